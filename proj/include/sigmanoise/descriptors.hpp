#pragma once

#include "sigmanoise/ifs.hpp"
#include "sigmanoise/measure.hpp"

#include <string_view>

namespace sigmanoise {

/// Measure descriptors, shorthand or JSON:
///
///   lebesgue:0,1          Lebesgue on [0,1]; `lebesgue:0,1*2` scales by 2
///   poly:0,1;0,2          density 0 + 2x on [0,1] (coefficients by degree)
///   atomic:0@0.25;1@0.75  atoms point@mass
///   cantor | binary       IFS invariant measures
///   bernoulli:0.5         Bernoulli convolution law
///   a+b                   sum of two descriptors
///
///   {"kind":"lebesgue","lo":0,"hi":1,"scale":1}
///   {"kind":"polynomial","lo":0,"hi":1,"coefficients":[0,2]}
///   {"kind":"atomic","atoms":[[0,0.25],[1,0.75]]}
///   {"kind":"ifs","branches":[[r,s],...],"weights":[...],"scale":1}
///   {"kind":"cantor"} {"kind":"binary"} {"kind":"bernoulli","lambda":0.5}
///   {"kind":"sum","parts":[...]}
///
/// Throws std::invalid_argument naming the malformed part.
SigmaFiniteMeasure parse_measure(std::string_view text);

/// `cantor`, `binary`, or {"branches":[[r,s],...],"weights":[...]}.
IteratedFunctionSystem parse_ifs(std::string_view text);

/// `a,b` is (a,b]; `a,b;c,d` a union; `cyl:01` a cylinder of the measure's
/// IFS; `all` the real line.
BorelSet parse_set(std::string_view text, const SigmaFiniteMeasure& mu);

}  // namespace sigmanoise
