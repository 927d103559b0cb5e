#ifndef TBPP_PARSER_HPP
#define TBPP_PARSER_HPP

#include <stdexcept>
#include <string>

#include "tbpp/model.hpp"

namespace tbpp {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int line_, int col_, const std::string& what_)
        : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " +
                             what_),
          line(line_),
          column(col_) {}
};

// Parses the textual modeling language:
//
//   clocks x y;
//   nonterminals X Y Z;
//   init X;
//   targets T T U;
//   rule X [x <= 2, y > 0] {x := 0, y := x} -> Y Z;
//   rule Z [x > 0] -> ;
//   query cover;            (also: reach, simple-reach, simple-cover,
//                            nonempty, ternary 7/2)
//
// `#` starts a comment running to end of line. Throws ParseError with
// line/column on malformed input; the returned model is validated.
TbppModel parse_model(const std::string& text);

}  // namespace tbpp

#endif
