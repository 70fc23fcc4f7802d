// Textual program format (see docs/FORMATS.md for the grammar).
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "dilforge/isa.hpp"

namespace dilforge {

struct AsmParseError : std::runtime_error {
  AsmParseError(size_t line, const std::string& what);
  size_t line;
};

std::string format_instruction(const Instruction& in);
void write_program(std::ostream& out, const Program& prog);

// Large data segments are written as `.datafile` sidecars next to `path`
// (one .bin per segment over the inline threshold); small ones inline.
void write_program_file(const std::string& path, const Program& prog,
                        size_t inline_threshold = 4096);

Program read_program(std::istream& in, const std::string& dir = ".");
Program read_program_file(const std::string& path);

}  // namespace dilforge
