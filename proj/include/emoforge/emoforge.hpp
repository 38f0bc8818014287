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

#ifndef EMOFORGE_EMOFORGE_HPP
#define EMOFORGE_EMOFORGE_HPP

#include "emoforge/corpus.hpp"
#include "emoforge/errors.hpp"
#include "emoforge/label.hpp"
#include "emoforge/linear_models.hpp"
#include "emoforge/metrics.hpp"
#include "emoforge/model_io.hpp"
#include "emoforge/neural.hpp"
#include "emoforge/rng.hpp"
#include "emoforge/runner.hpp"
#include "emoforge/sparse.hpp"
#include "emoforge/tagcloud.hpp"
#include "emoforge/textprep.hpp"
#include "emoforge/tree_models.hpp"
#include "emoforge/vectorizer.hpp"

#endif // EMOFORGE_EMOFORGE_HPP
