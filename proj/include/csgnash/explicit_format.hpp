#pragma once

#include <iosfwd>
#include <string>

#include "csgnash/csg.hpp"

namespace csgnash {

// Plain-text game format:
//
//   players p1 p2
//   actions p1: c1 s1
//   actions p2: c2 s2
//   state 0 "s1" init {}
//   state 2 "t1" {a1}
//   0 (c1,_) -> 1:1
//   0 (s1,_) -> 1/4:2 + 3/4:3
//   reward "r1" state 2 : 1
//   reward "r1" 0 (s1,_) : 1/3
//
// Action names are unique across players; `_` is the idle action. Lines starting with '#' or '//' are comments.
Csg parse_explicit(const std::string& text);
Csg load_explicit(const std::string& path);

std::string write_explicit(const Csg& g);
void save_explicit(const Csg& g, const std::string& path);

}  // namespace csgnash
