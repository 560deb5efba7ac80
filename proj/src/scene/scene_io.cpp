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
#include "socialmask/scene/scene_io.hpp"

#include <fstream>

#include <json.hpp>

namespace socialmask
{

using nlohmann::json;

SceneFormatError::SceneFormatError(std::size_t line, const std::string & what)
: std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

std::string scene_to_json_line(const Scene & scene)
{
  json frames = json::array();
  for (const auto & f : scene.frames) {
    json agents = json::array();
    for (const auto & a : f.agents) {
      agents.push_back({{"id", a.id},
                        {"class", std::string(to_string(a.agent_class))},
                        {"x", a.position.x},
                        {"y", a.position.y},
                        {"z", a.position.z}});
    }
    frames.push_back({{"t", f.t}, {"agents", std::move(agents)}});
  }
  json doc = {{"scene_id", scene.scene_id}, {"frame_period_s", scene.frame_period_s}, {"frames", std::move(frames)}};
  return doc.dump();
}

namespace
{

const json & field(const json & obj, const char * key, std::size_t line, const std::string & where)
{
  if (!obj.is_object()) {
    throw SceneFormatError(line, where + " is not an object");
  }
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SceneFormatError(line, where + " is missing field \"" + key + "\"");
  }
  return *it;
}

double number(const json & v, const char * key, std::size_t line, const std::string & where)
{
  if (!v.is_number()) {
    throw SceneFormatError(line, where + " field \"" + key + "\" is not a number");
  }
  return v.get<double>();
}

std::int64_t integer(const json & v, const char * key, std::size_t line, const std::string & where)
{
  if (!v.is_number_integer()) {
    throw SceneFormatError(line, where + " field \"" + key + "\" is not an integer");
  }
  return v.get<std::int64_t>();
}

}  // namespace

Scene scene_from_json_line(std::string_view text, std::size_t line_number)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    throw SceneFormatError(line_number, std::string("invalid JSON: ") + e.what());
  }
  Scene scene;
  const json & id = field(doc, "scene_id", line_number, "scene");
  if (!id.is_string()) {
    throw SceneFormatError(line_number, "scene field \"scene_id\" is not a string");
  }
  scene.scene_id = id.get<std::string>();
  scene.frame_period_s =
    number(field(doc, "frame_period_s", line_number, "scene"), "frame_period_s", line_number, "scene");
  const json & frames = field(doc, "frames", line_number, "scene");
  if (!frames.is_array()) {
    throw SceneFormatError(line_number, "scene field \"frames\" is not an array");
  }
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    const json & fj = frames[fi];
    const std::string where = "frame " + std::to_string(fi);
    Frame frame;
    frame.t = integer(field(fj, "t", line_number, where), "t", line_number, where);
    const json & agents = field(fj, "agents", line_number, where);
    if (!agents.is_array()) {
      throw SceneFormatError(line_number, where + " field \"agents\" is not an array");
    }
    for (std::size_t ai = 0; ai < agents.size(); ++ai) {
      const json & aj = agents[ai];
      const std::string aw = where + " agent " + std::to_string(ai);
      AgentObservation obs;
      obs.id = integer(field(aj, "id", line_number, aw), "id", line_number, aw);
      const json & cls = field(aj, "class", line_number, aw);
      const auto parsed = cls.is_string() ? parse_agent_class(cls.get<std::string>()) : std::nullopt;
      if (!parsed) {
        throw SceneFormatError(line_number, aw + " has unknown class " + cls.dump());
      }
      obs.agent_class = *parsed;
      obs.position.x = number(field(aj, "x", line_number, aw), "x", line_number, aw);
      obs.position.y = number(field(aj, "y", line_number, aw), "y", line_number, aw);
      obs.position.z = number(field(aj, "z", line_number, aw), "z", line_number, aw);
      frame.agents.push_back(obs);
    }
    scene.frames.push_back(std::move(frame));
  }
  try {
    validate_scene(scene);
  } catch (const std::invalid_argument & e) {
    throw SceneFormatError(line_number, e.what());
  }
  return scene;
}

std::vector<Scene> read_scenes(std::istream & in)
{
  std::vector<Scene> scenes;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    scenes.push_back(scene_from_json_line(text, line));
  }
  return scenes;
}

std::vector<Scene> import_scenes(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scene file " + path.string());
  }
  return read_scenes(in);
}

void write_scenes(std::ostream & out, const std::vector<Scene> & scenes)
{
  for (const auto & s : scenes) {
    out << scene_to_json_line(s) << '\n';
  }
}

void export_scenes(const std::filesystem::path & path, const std::vector<Scene> & scenes)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write scene file " + path.string());
  }
  write_scenes(out, scenes);
  if (!out) {
    throw std::runtime_error("failed writing scene file " + path.string());
  }
}

}  // namespace socialmask
