/*
 * This file is part of vogrid, a desk-scale virtual-organization grid.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vogrid/journal.hpp"

#include <fstream>
#include <sstream>

#include "vogrid/errors.hpp"

namespace vogrid {

namespace {
const std::string kHeader = "vogrid-journal v1";
}

void Journal::append(const nlohmann::json& record) {
  records_.push_back(record.dump());
  if (!file_base_.empty()) {
    std::ofstream out(file_base_ + ".journal", std::ios::app);
    out << records_.back() << "\n";
  }
}

void Journal::set_snapshot(const nlohmann::json& snap) {
  snapshot_ = snap;
  records_.clear();
  if (!file_base_.empty()) sync();
}

void Journal::attach_files(const std::string& base) {
  file_base_ = base;
  std::ifstream snap(base + ".snapshot");
  if (snap) {
    std::string header;
    std::getline(snap, header);
    if (header != kHeader) fail(Errc::ParseError, "unsupported snapshot version: " + header);
    std::ostringstream body;
    body << snap.rdbuf();
    if (!body.str().empty()) snapshot_ = nlohmann::json::parse(body.str());
  }
  std::ifstream jr(base + ".journal");
  if (jr) {
    std::string line;
    while (std::getline(jr, line))
      if (!line.empty()) records_.push_back(line);
  }
}

void Journal::sync() const {
  if (file_base_.empty()) return;
  {
    std::ofstream out(file_base_ + ".snapshot", std::ios::trunc);
    out << kHeader << "\n";
    if (snapshot_) out << snapshot_->dump();
  }
  {
    std::ofstream out(file_base_ + ".journal", std::ios::trunc);
    for (const auto& r : records_) out << r << "\n";
  }
}

std::string Journal::serialize() const {
  std::string out = kHeader + "\n";
  out += snapshot_ ? snapshot_->dump() : std::string("null");
  out += "\n";
  for (const auto& r : records_) out += r + "\n";
  return out;
}

Journal Journal::deserialize(const std::string& text) {
  Journal j;
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  if (header != kHeader) fail(Errc::ParseError, "unsupported journal version: " + header);
  std::string snap_line;
  std::getline(in, snap_line);
  if (!snap_line.empty() && snap_line != "null") j.snapshot_ = nlohmann::json::parse(snap_line);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) j.records_.push_back(line);
  return j;
}

}  // namespace vogrid
