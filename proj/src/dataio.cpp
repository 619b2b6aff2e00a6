#include "dspecies/dataio.hpp"

#include "dspecies/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace dspecies {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<Index> to_index(const std::string& s) {
  Index v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

Index metadata_index(const std::string& key, const std::string& value, std::size_t line) {
  const auto v = to_index(value);
  if (!v || *v < 0) throw ParseError("metadata '" + key + "' is not a nonnegative integer", line);
  return *v;
}

}  // namespace

Dataset parse_spectrum(std::istream& in, const ParseOptions& options, const std::string& default_name) {
  std::map<Index, Index> spectrum;
  std::string name = default_name;
  std::string source;
  std::optional<Index> known_n;
  std::optional<Index> zero_class;
  std::optional<Index> declared_k;
  std::optional<Index> declared_p;
  bool seen_data = false;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(body.substr(0, colon));
      const std::string value = trim(body.substr(colon + 1));
      if (key == "name")
        name = value;
      else if (key == "source")
        source = value;
      else if (key == "known_n")
        known_n = metadata_index(key, value, line_no);
      else if (key == "k")
        declared_k = metadata_index(key, value, line_no);
      else if (key == "p")
        declared_p = metadata_index(key, value, line_no);
      continue;
    }

    std::string a;
    std::string b;
    const auto comma = line.find(',');
    if (comma != std::string::npos) {
      a = trim(line.substr(0, comma));
      b = trim(line.substr(comma + 1));
    } else {
      if (options.format == SpectrumFormat::csv)
        throw ParseError("expected 'i,A(i)'", line_no);
      std::istringstream fields(line);
      std::string extra;
      if (!(fields >> a >> b) || (fields >> extra)) throw ParseError("expected 'i A(i)'", line_no);
    }
    const auto i = to_index(a);
    const auto count = to_index(b);
    if (!i || !count) {
      // a csv file may open with a column header
      if (options.format == SpectrumFormat::csv && !seen_data && !i && !count) {
        seen_data = true;
        continue;
      }
      throw ParseError("expected two integers, got '" + line + "'", line_no);
    }
    seen_data = true;
    if (*i < 0) throw ParseError("occurrence count i must be >= 0", line_no);
    if (*count < 0) throw ParseError("species count A(i) must be >= 1", line_no);
    if (*count == 0) throw ValidationError("line " + std::to_string(line_no) + ": zero species count for i = " + a);
    if (*i == 0) {
      if (!options.allow_zero_class)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": zero class (i = 0) needs allow_zero_class");
      if (zero_class) throw ValidationError("line " + std::to_string(line_no) + ": duplicate i = 0");
      zero_class = *count;
      continue;
    }
    if (!spectrum.emplace(*i, *count).second)
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate i = " + a);
  }
  if (spectrum.empty()) throw ValidationError("empty spectrum");

  Dataset ds{name, FrequencySpectrum(std::move(spectrum)), known_n, zero_class, source};
  if (declared_k && *declared_k != ds.spectrum.k())
    throw ValidationError("declared k = " + std::to_string(*declared_k) + " but the data give " +
                          std::to_string(ds.spectrum.k()));
  if (declared_p && *declared_p != ds.spectrum.p())
    throw ValidationError("declared p = " + std::to_string(*declared_p) + " but the data give " +
                          std::to_string(ds.spectrum.p()));
  return ds;
}

Dataset parse_spectrum_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string stem = path;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  return parse_spectrum(in, options, stem);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  out << "# name: " << dataset.name << '\n';
  if (!dataset.source_note.empty()) out << "# source: " << dataset.source_note << '\n';
  if (dataset.known_n) out << "# known_n: " << *dataset.known_n << '\n';
  out << "# k: " << dataset.spectrum.k() << '\n';
  out << "# p: " << dataset.spectrum.p() << '\n';
  if (dataset.zero_class) out << "0 " << *dataset.zero_class << '\n';
  for (const auto& [i, a] : dataset.spectrum.entries()) out << i << ' ' << a << '\n';
}

namespace {

Dataset make(const char* name, std::map<Index, Index> spectrum, std::optional<Index> known_n,
             std::optional<Index> zero_class, const char* note, Index k, Index p) {
  Dataset ds{name, FrequencySpectrum(std::move(spectrum)), known_n, zero_class, note};
  if (ds.spectrum.k() != k || ds.spectrum.p() != p)
    throw ValidationError(std::string("bundled dataset ") + name + " does not match its stated k, p");
  return ds;
}

std::vector<Dataset> build_bundled() {
  std::vector<Dataset> out;
  out.push_back(make("madison", {{1, 63}, {2, 29}, {3, 8}, {4, 4}, {5, 1}, {6, 1}}, 262, 156,
                     "Mosteller-Wallace word counts, occurrences of 'may' per Madison paper", 172, 106));
  out.push_back(make("hamilton", {{1, 60}, {2, 20}, {3, 5}, {4, 2}, {5, 2}, {6, 1}}, 247, 157,
                     "Mosteller-Wallace word counts, occurrences of 'can' per Hamilton paper", 139, 90));
  // Printed column order 17, 29, 20, 21, ... is kept as (q, A(q)) pairs.
  out.push_back(make("janzen-1967-day",
                     {{1, 70}, {2, 17}, {3, 4}, {4, 5}, {5, 5}, {6, 5}, {7, 5}, {8, 3}, {9, 1},
                      {10, 2}, {11, 3}, {12, 2}, {14, 2}, {17, 1}, {29, 2}, {20, 3}, {21, 1},
                      {24, 1}, {26, 1}, {40, 1}, {57, 2}, {60, 1}, {64, 1}, {71, 1}, {77, 1}},
                     std::nullopt, std::nullopt, "Janzen beetles, Osa secondary, day, dry season 1967",
                     996, 140));
  out.push_back(make("janzen-1967-night",
                     {{1, 61}, {2, 24}, {3, 13}, {4, 12}, {5, 5}, {7, 6}, {8, 5}, {9, 2}, {10, 4},
                      {11, 2}, {12, 3}, {13, 1}, {15, 1}, {17, 1}, {18, 2}, {19, 2}, {26, 1},
                      {30, 1}, {33, 1}, {40, 1}, {44, 1}, {62, 2}},
                     std::nullopt, std::nullopt, "Janzen beetles, Osa secondary, night, dry season 1967",
                     835, 151));
  out.push_back(make("janzen-1968-day",
                     {{1, 85}, {2, 12}, {3, 10}, {4, 4}, {5, 6}, {6, 3}, {7, 5}, {9, 1}, {10, 2},
                      {11, 1}, {12, 1}, {13, 1}, {15, 1}, {18, 2}, {20, 1}, {24, 1}, {25, 1},
                      {28, 1}, {29, 1}, {30, 1}, {79, 1}, {106, 1}, {112, 1}},
                     std::nullopt, std::nullopt, "Janzen beetles, Osa secondary, day, dry season 1968",
                     807, 143));
  return out;
}

}  // namespace

const std::vector<Dataset>& bundled_datasets() {
  static const std::vector<Dataset> data = build_bundled();
  return data;
}

const Dataset& bundled_dataset(const std::string& name) {
  for (const Dataset& d : bundled_datasets())
    if (d.name == name) return d;
  std::string known;
  for (const Dataset& d : bundled_datasets()) known += (known.empty() ? "" : ", ") + d.name;
  throw ValidationError("unknown bundled dataset '" + name + "' (known: " + known + ")");
}

}  // namespace dspecies
