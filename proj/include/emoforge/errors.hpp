/*
 * Copyright 2026 emoforge contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EMOFORGE_ERRORS_HPP
#define EMOFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace emoforge {

/// Base class for every error this library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (bad row, bad JSON, truncated model file).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A label string outside {positive, negative, neutral}.
class LabelError : public Error {
public:
    using Error::Error;
};

/// Stratified split preconditions violated.
class SplitError : public Error {
public:
    using Error::Error;
};

/// Vectorizer fit produced an empty vocabulary, or bad fit input.
class FitError : public Error {
public:
    using Error::Error;
};

/// Dimension mismatch between a model and its input.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Training loss became non-finite.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Input exceeds a documented size cap (kernel SVM sample cap).
class SizeError : public Error {
public:
    using Error::Error;
};

/// AdaBoost base learner no better than chance on the first stage.
class BoostError : public Error {
public:
    using Error::Error;
};

/// Tag cloud built from an empty document list.
class CloudError : public Error {
public:
    using Error::Error;
};

/// Model file with an unknown kind or wrong format marker.
class FormatError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Model file with an unsupported version number.
class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Filesystem problem (missing file, unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace emoforge

#endif // EMOFORGE_ERRORS_HPP
