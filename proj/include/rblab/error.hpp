// Copyright 2026 The rblab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace rblab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not match (non-square input, mismatched dimensions).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid user input: bad parameter range, malformed experiment spec.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed or an invariant was breached beyond tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The sufficient conditions of the perturbative block split (or of the
/// decay-model bound) are not met, so no certified output exists.
class PremiseError : public Error {
 public:
  using Error::Error;
};

}  // namespace rblab
