// Copyright 2026 The postsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POSTSEL_ERRORS_HPP
#define POSTSEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace postsel {

/// Bad input: out-of-range parameters, dimension mismatches, malformed config.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The equal-superposition condition has no root for the requested inputs.
struct NoSolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Base for failures of an otherwise well-posed computation.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Population reached the top of the retained Fock space.
struct TailOverflowError : NumericalError {
    using NumericalError::NumericalError;
};

/// Post-selection outcome probability is (numerically) zero.
struct DegeneratePostSelectionError : NumericalError {
    using NumericalError::NumericalError;
};

/// Adaptive integrator could not satisfy its tolerance.
struct StepSizeUnderflowError : NumericalError {
    using NumericalError::NumericalError;
};

/// Weak value is infinite (post-selection orthogonal to pre-selection).
struct NonFiniteWeakValueError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace postsel

#endif
