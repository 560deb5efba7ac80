// Copyright 2026 The socialmask Authors
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
#ifndef SOCIALMASK__SCENE__SCENE_IO_HPP_
#define SOCIALMASK__SCENE__SCENE_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "socialmask/scene/types.hpp"

namespace socialmask
{

/// A malformed scene line. `line()` is 1-based.
class SceneFormatError : public std::runtime_error
{
public:
  SceneFormatError(std::size_t line, const std::string & what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// One scene as a single-line JSON document (no trailing newline).
std::string scene_to_json_line(const Scene & scene);

/// Parses and validates one scene line; `line_number` is used in errors.
Scene scene_from_json_line(std::string_view text, std::size_t line_number = 1);

/// Blank lines are skipped; an empty stream yields an empty list.
std::vector<Scene> read_scenes(std::istream & in);
std::vector<Scene> import_scenes(const std::filesystem::path & path);

void write_scenes(std::ostream & out, const std::vector<Scene> & scenes);
void export_scenes(const std::filesystem::path & path, const std::vector<Scene> & scenes);

}  // namespace socialmask

#endif  // SOCIALMASK__SCENE__SCENE_IO_HPP_
