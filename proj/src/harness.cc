// Copyright 2026 The Dresslab Authors
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


#include "dresslab/harness.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace dresslab {
namespace {

constexpr SizeClass kSizes[] = {SizeClass::kSmall, SizeClass::kMedium,
                                SizeClass::kLarge, SizeClass::kXLarge};

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Trial-weighted mean upper ratio of `method` over cells passing `keep`.
template <typename Keep>
double Mean(const std::vector<EvalCell>& cells, const std::string& method, Keep keep) {
  double sum = 0.0;
  int n = 0;
  for (const EvalCell& c : cells) {
    if (c.method != method || !keep(c)) continue;
    sum += c.upper * c.trials;
    n += c.trials;
  }
  return n > 0 ? sum / n : 0.0;
}

// Table entry: the mean, or "-" when no cell matches.
template <typename Keep>
std::string Entry(const std::vector<EvalCell>& cells, const std::string& method, Keep keep,
                  int digits) {
  const bool any = std::any_of(cells.begin(), cells.end(), [&](const EvalCell& c) {
    return c.method == method && c.trials > 0 && keep(c);
  });
  return any ? Fixed(Mean(cells, method, keep), digits) : "-";
}

std::string Table(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows, bool csv) {
  std::ostringstream os;
  if (csv) {
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
  }
  std::vector<std::size_t> w(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) w[i] = header[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << "  ";
      const std::string pad(w[i] - r[i].size(), ' ');
      os << (i == 0 ? r[i] + pad : pad + r[i]);
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::vector<std::string> Split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

uint64_t EpisodeSeed(uint64_t master, uint64_t index) {
  return SplitSeed(master, index);
}

std::vector<EnvConfig> SourceConfigs(int n, uint64_t master_seed) {
  if (n < 0) throw RangeError("negative episode count");
  const std::vector<std::string> garments = GarmentProfileNames();
  std::vector<EnvConfig> out;
  for (int i = 0; i < n; ++i) {
    EnvConfig c;
    c.domain = Domain::kSource;
    c.body = StandardBody(kSizes[i % 4]);
    c.garment = GarmentProfile(garments[(i / 4) % garments.size()]);
    c.seed = EpisodeSeed(master_seed, i);
    out.push_back(c);
  }
  return out;
}

std::vector<MotionName> FinetuneMotions() {
  return {MotionName::kRaiseArm, MotionName::kLowerArm, MotionName::kOpenArm,
          MotionName::kReachSide, MotionName::kScratchHead};
}

std::vector<std::string> FinetuneGarments() { return {"standard", "wide"}; }

std::vector<EnvConfig> TargetConfigs(int n, uint64_t master_seed) {
  if (n < 0) throw RangeError("negative episode count");
  const std::vector<MotionName> motions = FinetuneMotions();
  const std::vector<std::string> garments = FinetuneGarments();
  std::vector<EnvConfig> out;
  for (int i = 0; i < n; ++i) {
    EnvConfig c;
    c.domain = Domain::kTarget;
    c.body = StandardBody(SizeClass::kMedium);
    c.motion = DefaultMotion(motions[i % motions.size()]);
    c.garment = GarmentProfile(garments[(i / motions.size()) % garments.size()]);
    c.seed = EpisodeSeed(master_seed, i);
    out.push_back(c);
  }
  return out;
}

std::vector<Trajectory> Collect(Policy& policy, const std::vector<EnvConfig>& configs) {
  std::vector<Trajectory> out;
  out.reserve(configs.size());
  for (const EnvConfig& c : configs) out.push_back(RunEpisode(policy, c));
  return out;
}

int EvalGrid::Cells() const {
  return static_cast<int>(garments.size() * motions.size() * sizes.size());
}

EvalGrid DeskGrid() {
  return {{"narrow", "short"}, AllMotions(), {std::begin(kSizes), std::end(kSizes)}, 5};
}

EvalGrid FullGrid() {
  return {GarmentProfileNames(), AllMotions(), {std::begin(kSizes), std::end(kSizes)}, 10};
}

std::vector<std::string> EvalReport::Methods() const {
  std::vector<std::string> out;
  for (const EvalCell& c : cells) {
    if (std::find(out.begin(), out.end(), c.method) == out.end()) out.push_back(c.method);
  }
  return out;
}

double EvalReport::MeanUpper(const std::string& method) const {
  return Mean(cells, method, [](const EvalCell&) { return true; });
}

double EvalReport::MeanWhole(const std::string& method) const {
  double sum = 0.0;
  int n = 0;
  for (const EvalCell& c : cells) {
    if (c.method != method) continue;
    sum += c.whole * c.trials;
    n += c.trials;
  }
  return n > 0 ? sum / n : 0.0;
}

std::array<int, kTerminationCount> EvalReport::Reasons(const std::string& method) const {
  std::array<int, kTerminationCount> out{};
  for (const EvalCell& c : cells) {
    if (c.method != method) continue;
    for (int k = 0; k < kTerminationCount; ++k) out[k] += c.reasons[k];
  }
  return out;
}

int EvalReport::Episodes(const std::string& method) const {
  int n = 0;
  for (const EvalCell& c : cells) {
    if (c.method == method) n += c.trials;
  }
  return n;
}

std::string EvalReport::SizeTable() const {
  std::vector<std::string> header = {"method"};
  for (SizeClass s : kSizes) header.emplace_back(SizeClassName(s));
  header.push_back("Average");
  std::vector<std::vector<std::string>> rows;
  for (const std::string& m : Methods()) {
    std::vector<std::string> r = {m};
    for (SizeClass s : kSizes) {
      r.push_back(Entry(cells, m, [s](const EvalCell& c) { return c.size == s; }, 3));
    }
    r.push_back(Fixed(MeanUpper(m), 3));
    rows.push_back(std::move(r));
  }
  return Table(header, rows, false);
}

std::string EvalReport::SizeCsv() const {
  std::vector<std::string> header = {"method"};
  for (SizeClass s : kSizes) header.emplace_back(SizeClassName(s));
  header.push_back("Average");
  std::vector<std::vector<std::string>> rows;
  for (const std::string& m : Methods()) {
    std::vector<std::string> r = {m};
    for (SizeClass s : kSizes) {
      r.push_back(Entry(cells, m, [s](const EvalCell& c) { return c.size == s; }, 4));
    }
    r.push_back(Fixed(MeanUpper(m), 4));
    rows.push_back(std::move(r));
  }
  return Table(header, rows, true);
}

namespace {

std::vector<std::string> MotionColumns(const std::vector<EvalCell>& cells) {
  std::vector<std::string> out;
  for (const EvalCell& c : cells) {
    if (std::find(out.begin(), out.end(), c.motion) == out.end()) out.push_back(c.motion);
  }
  return out;
}

}  // namespace

std::string EvalReport::MotionTable() const {
  const std::vector<std::string> motions = MotionColumns(cells);
  std::vector<std::string> header = {"method"};
  header.insert(header.end(), motions.begin(), motions.end());
  header.push_back("Average");
  std::vector<std::vector<std::string>> rows;
  for (const std::string& m : Methods()) {
    std::vector<std::string> r = {m};
    for (const std::string& mo : motions) {
      r.push_back(Entry(cells, m, [&](const EvalCell& c) { return c.motion == mo; }, 3));
    }
    r.push_back(Fixed(MeanUpper(m), 3));
    rows.push_back(std::move(r));
  }
  return Table(header, rows, false);
}

std::string EvalReport::MotionCsv() const {
  const std::vector<std::string> motions = MotionColumns(cells);
  std::vector<std::string> header = {"method"};
  header.insert(header.end(), motions.begin(), motions.end());
  header.push_back("Average");
  std::vector<std::vector<std::string>> rows;
  for (const std::string& m : Methods()) {
    std::vector<std::string> r = {m};
    for (const std::string& mo : motions) {
      r.push_back(Entry(cells, m, [&](const EvalCell& c) { return c.motion == mo; }, 4));
    }
    r.push_back(Fixed(MeanUpper(m), 4));
    rows.push_back(std::move(r));
  }
  return Table(header, rows, true);
}

std::string EvalReport::CellsCsv() const {
  std::ostringstream os;
  os << "method,garment,motion,size,upper,whole,trials";
  for (Termination t : kAllTerminations) os << ',' << TerminationName(t);
  os << '\n';
  for (const EvalCell& c : cells) {
    os << c.method << ',' << c.garment << ',' << c.motion << ','
       << SizeClassName(c.size) << ',' << Exact(c.upper) << ',' << Exact(c.whole)
       << ',' << c.trials;
    for (int k : c.reasons) os << ',' << k;
    os << '\n';
  }
  return os.str();
}

EvalReport EvalReport::FromCellsCsv(const std::string& text) {
  EvalReport r;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ContractError("empty evaluation table");
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> f = Split(line, ',');
    if (f.size() != 7 + kTerminationCount) {
      throw ContractError("evaluation table row " + std::to_string(row) +
                          " has the wrong column count");
    }
    EvalCell c;
    try {
      c.method = f[0];
      c.garment = f[1];
      c.motion = f[2];
      c.size = ParseSizeClass(f[3]);
      c.upper = std::stod(f[4]);
      c.whole = std::stod(f[5]);
      c.trials = std::stoi(f[6]);
      for (int k = 0; k < kTerminationCount; ++k) c.reasons[k] = std::stoi(f[7 + k]);
    } catch (const std::logic_error&) {
      throw ContractError("malformed evaluation table row " + std::to_string(row));
    }
    r.cells.push_back(std::move(c));
  }
  return r;
}

EvalReport EvaluateGrid(const std::string& method, Policy& policy,
                        const EvalGrid& grid, uint64_t seed) {
  if (grid.trials < 1) throw RangeError("evaluation needs at least one trial");
  EvalReport r;
  int cell = 0;
  for (const std::string& g : grid.garments) {
    for (const MotionSpec& m : grid.motions) {
      for (SizeClass s : grid.sizes) {
        EvalCell c;
        c.method = method;
        c.garment = g;
        c.motion = m.Label();
        c.size = s;
        c.trials = grid.trials;
        for (int k = 0; k < grid.trials; ++k) {
          EnvConfig e;
          e.domain = Domain::kTarget;
          e.body = StandardBody(s);
          e.garment = GarmentProfile(g);
          e.motion = m;
          e.seed = EpisodeSeed(seed, static_cast<uint64_t>(cell) * grid.trials + k);
          const Trajectory t = RunEpisode(policy, e);
          const DressedRatios d = ComputeDressedRatios(t);
          c.upper += d.upper / grid.trials;
          c.whole += d.whole / grid.trials;
          ++c.reasons[static_cast<int>(t.meta.reason) - 1];
        }
        r.cells.push_back(std::move(c));
        ++cell;
      }
    }
  }
  return r;
}

void MergeReports(EvalReport& into, const EvalReport& other) {
  into.cells.insert(into.cells.end(), other.cells.begin(), other.cells.end());
}

}  // namespace dresslab
