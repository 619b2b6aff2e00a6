#pragma once

// Frequency-spectrum files and the bundled data sets.
//
// Grammar: blank lines and lines starting with '#' are ignored, except
// metadata comments of the form "# key: value" with key one of name, k, p,
// known_n, source. Data lines are "i A(i)" with a comma or whitespace
// separator, i >= 1 and A(i) >= 1. A zero class (i = 0) is accepted only
// with allow_zero_class; it is kept as metadata and never enters the
// spectrum.

#include "dspecies/numerics.hpp"
#include "dspecies/sampling.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dspecies {

struct Dataset {
  std::string name;
  FrequencySpectrum spectrum;
  std::optional<Index> known_n;
  std::optional<Index> zero_class;  // A(0) when the source reports it
  std::string source_note;
};

enum class SpectrumFormat { pairs, csv };

struct ParseOptions {
  SpectrumFormat format = SpectrumFormat::pairs;
  bool allow_zero_class = false;
};

/// Throws ParseError (with line number) on malformed lines and
/// ValidationError on duplicate i, zero counts, an empty spectrum or
/// declared k/p that disagree with the data.
Dataset parse_spectrum(std::istream& in, const ParseOptions& options = {},
                       const std::string& default_name = "");
Dataset parse_spectrum_file(const std::string& path, const ParseOptions& options = {});

/// Writes metadata comments and one "i A(i)" line per entry; parsing the
/// output gives back the same name and spectrum.
void write_dataset(std::ostream& out, const Dataset& dataset);

/// madison, hamilton, janzen-1967-day, janzen-1967-night, janzen-1968-day.
const std::vector<Dataset>& bundled_datasets();
/// ValidationError for an unknown name.
const Dataset& bundled_dataset(const std::string& name);

}  // namespace dspecies
