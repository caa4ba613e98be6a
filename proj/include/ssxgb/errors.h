/*
 * Copyright 2026 The SSXGB Authors.
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

#ifndef SSXGB_ERRORS_H_
#define SSXGB_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ssxgb {

// Root of every error this library throws. The CLI maps ConfigError to exit
// code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plaintext outside Z_N.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Safe-prime or generator search exhausted its retry budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Ciphertext does not decrypt under the supplied key.
class DecryptionError : public Error {
 public:
  using Error::Error;
};

// Public parameters are inconsistent (e.g. kconst not invertible mod N).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Fixed-point magnitude exceeds the configured bound, or NaN/Inf input.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class ScaleMismatchError : public Error {
 public:
  using Error::Error;
};

class KeyMismatchError : public Error {
 public:
  using Error::Error;
};

// Any failure inside an interactive two-server exchange.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class BusError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ssxgb

#endif  // SSXGB_ERRORS_H_
