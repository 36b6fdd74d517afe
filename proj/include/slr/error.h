/*
 * Copyright 2026 The slr-irls Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
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

namespace slr
{

// Precondition violations on sizes, ranks, sparsity levels, indices.
class InvalidDimension : public std::invalid_argument
{
   public:
    using std::invalid_argument::invalid_argument;
};

class InvalidArgument : public std::invalid_argument
{
   public:
    using std::invalid_argument::invalid_argument;
};

// Raised when an operation would exceed a memory or size budget.
class ResourceError : public std::runtime_error
{
   public:
    using std::runtime_error::runtime_error;
};

// An iterative solver hit its iteration cap. Carries the residual it reached.
class ConvergenceError : public std::runtime_error
{
   public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations)
    {
    }

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

   private:
    double residual_;
    int iterations_;
};

}  // namespace slr
