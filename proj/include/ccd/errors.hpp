/*
   Copyright 2026 The ccdetect Authors

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

#pragma once

#include <stdexcept>
#include <string>

namespace ccd {

// Every library failure derives from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error { public: using Error::Error; };
class ProbabilityError : public Error { public: using Error::Error; };
class PriorError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class RankError : public Error { public: using Error::Error; };
class ZeroVectorError : public Error { public: using Error::Error; };
class SingularCovarianceError : public Error { public: using Error::Error; };
class InfeasibleError : public Error { public: using Error::Error; };
class UnknownFigureError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

}  // namespace ccd
