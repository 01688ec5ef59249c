/*
   Copyright 2026 the qtr authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef QTR_ERRORS_HPP
#define QTR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qtr {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A truncated series was asked for a coefficient beyond its certified order.
struct TruncationInsufficient : Error {
    explicit TruncationInsufficient(const std::string& msg) : Error("truncation insufficient: " + msg) {}
};

/// A pole location is not representable in the active coefficient field.
struct PoleFieldMismatch : Error {
    explicit PoleFieldMismatch(const std::string& msg) : Error("pole outside coefficient field: " + msg) {}
};

/// Local expansion requested at an essential singularity of a quasi-rational.
struct EssentialSingularity : Error {
    explicit EssentialSingularity(const std::string& msg) : Error("essential singularity: " + msg) {}
};

/// Q -> 0 limit of a coefficient diverges.
struct DivergentClassicalLimit : Error {
    explicit DivergentClassicalLimit(const std::string& msg) : Error("divergent classical limit: " + msg) {}
};

struct NonSimpleRoot : Error {
    explicit NonSimpleRoot(const std::string& msg) : Error("non-simple root: " + msg) {}
};

struct UnsolvableAnsatz : Error {
    explicit UnsolvableAnsatz(const std::string& msg)
        : Error("kernel ansatz unsolvable (consider raising max_pole_order): " + msg) {}
};

/// The recursion kernel ODE has no analytic solution at a Bethe root; the
/// carried value is the offending residue obstruction.
struct BetheViolation : Error {
    std::string obstruction;
    BetheViolation(const std::string& msg, std::string obs)
        : Error("Bethe obstruction nonzero: " + msg + " (obstruction " + obs + ")"), obstruction(std::move(obs)) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg) : Error("recursion budget exceeded: " + msg) {}
};

struct MissingEntry : Error {
    explicit MissingEntry(const std::string& msg) : Error("correlator table entry missing: " + msg) {}
};

struct AmbiguousConvention : Error {
    explicit AmbiguousConvention(const std::string& msg) : Error("multiple sign conventions pass: " + msg) {}
};

struct NoValidConvention : Error {
    explicit NoValidConvention(const std::string& msg) : Error("no sign convention passes: " + msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("parse error: " + msg) {}
};

}  // namespace qtr

#endif
