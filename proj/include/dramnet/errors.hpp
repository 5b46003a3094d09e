/*
 * Copyright 2026 The dramnet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace dramnet {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid grid/image dimensions (zero sizes, non-divisible targets).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Tensor or layer shapes that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Out-of-range scalar parameter (crop fraction, split ratio, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents: bad magic, truncated payload, bad header.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition at run time, e.g. a
// training-mode batchnorm pass over a single sample.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Inputs for which the quantity is undefined (ROC with one class only).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace dramnet
