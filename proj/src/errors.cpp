#include "dlkit/errors.hpp"

namespace dlkit {

ParseError::ParseError(const std::string& msg, int line, int column)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line), column_(column) {}

}
