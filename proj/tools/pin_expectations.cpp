// Regenerates tests/expectations.json:
//   build/pin-expectations scenarios tests/expectations.json

#include <iostream>

#include "pinned.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: pin-expectations <scenarios-dir> <output.json>\n";
    return 1;
  }
  try {
    using namespace anderson_lab;
    json doc;
    doc["code_version"] = std::string(kCodeVersion);
    doc["entries"] = pinned::compute(argv[1]);
    write_text(argv[2], doc.dump(2) + "\n");
    std::cerr << "pinned " << doc["entries"].size() << " quantities into " << argv[2] << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
