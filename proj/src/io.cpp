#include "gesture/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "binary.hpp"

namespace gesture::io {

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return bytes;
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

void write_text_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw FormatError(std::string(what) + ": '" + s + "' is not a number");
  return v;
}

std::size_t to_size(const std::string& s, std::string_view what) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw FormatError(std::string(what) + ": '" + s + "' is not a count");
  return v;
}

GestureClass to_class(const std::string& s, std::string_view what) {
  const auto c = parse_class(s);
  if (!c) throw FormatError(std::string(what) + ": unknown class '" + s + "'");
  return *c;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv_rows(std::string_view text, std::size_t expected_columns,
                                                     std::string_view what) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto cells = split_line(line);
    if (expected_columns != 0 && cells.size() != expected_columns) {
      throw FormatError(std::string(what) + ": line " + std::to_string(line_no) + " has " +
                        std::to_string(cells.size()) + " columns, expected " + std::to_string(expected_columns));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

RadarConfig parse_radar_config(std::string_view text) {
  RadarConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(std::string_view(content).substr(0, eq));
    const auto value = trim(std::string_view(content).substr(eq + 1));
    const std::string what = "config key " + key;
    try {
      if (key == "f_low") cfg.f_low = to_double(value, what);
      else if (key == "f_high") cfg.f_high = to_double(value, what);
      else if (key == "num_samples") cfg.num_samples = to_size(value, what);
      else if (key == "num_chirps") cfg.num_chirps = to_size(value, what);
      else if (key == "num_rx") cfg.num_rx = to_size(value, what);
      else if (key == "adc_rate") cfg.adc_rate = to_double(value, what);
      else if (key == "t_prt") cfg.t_prt = to_double(value, what);
      else if (key == "frame_rate") cfg.frame_rate = to_double(value, what);
      else if (key == "antenna_spacing_wavelengths") cfg.antenna_spacing_wavelengths = to_double(value, what);
      else throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    } catch (const FormatError& e) {
      throw ValidationError(e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RadarConfig load_radar_config(const fs::path& path) { return parse_radar_config(read_text(path)); }

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string format_radar_config(const RadarConfig& c) {
  std::ostringstream os;
  os << "f_low = " << format_number(c.f_low) << '\n'
     << "f_high = " << format_number(c.f_high) << '\n'
     << "num_samples = " << c.num_samples << '\n'
     << "num_chirps = " << c.num_chirps << '\n'
     << "num_rx = " << c.num_rx << '\n'
     << "adc_rate = " << format_number(c.adc_rate) << '\n'
     << "t_prt = " << format_number(c.t_prt) << '\n'
     << "frame_rate = " << format_number(c.frame_rate) << '\n'
     << "antenna_spacing_wavelengths = " << format_number(c.antenna_spacing_wavelengths) << '\n';
  return os.str();
}

namespace {

constexpr std::string_view kRawMagic = "RFR1";
constexpr std::uint32_t kRawVersion = 1;
constexpr std::string_view kLabeledMagic = "LFS1";

}  // namespace

std::vector<std::uint8_t> encode_raw_sequence(std::span<const RawFrame> frames, const RadarConfig& config) {
  binary::Writer w;
  w.bytes(kRawMagic);
  w.u32(kRawVersion);
  w.u32(static_cast<std::uint32_t>(config.num_rx));
  w.u32(static_cast<std::uint32_t>(config.num_chirps));
  w.u32(static_cast<std::uint32_t>(config.num_samples));
  w.u32(static_cast<std::uint32_t>(frames.size()));
  w.buffer().reserve(w.buffer().size() + frames.size() * config.frame_size() * 4);
  for (const auto& f : frames) {
    if (!f.matches(config)) throw ValidationError("RFR1: frame shape does not match the radar config");
    for (float v : f.data()) w.f32(v);
  }
  return std::move(w.buffer());
}

std::vector<RawFrame> decode_raw_sequence(std::span<const std::uint8_t> bytes, const RadarConfig& config) {
  binary::Reader r(bytes, "RFR1 raw file");
  if (r.bytes(4) != kRawMagic) throw FormatError("RFR1 raw file: bad magic");
  const auto version = r.u32();
  if (version != kRawVersion) throw FormatError("RFR1 raw file: unsupported version " + std::to_string(version));
  const std::size_t R = r.u32(), C = r.u32(), S = r.u32(), count = r.u32();
  if (R != config.num_rx || C != config.num_chirps || S != config.num_samples) {
    throw FormatError("RFR1 raw file: shape [" + std::to_string(R) + "x" + std::to_string(C) + "x" +
                      std::to_string(S) + "] does not match the radar config");
  }
  if (r.remaining() != count * R * C * S * 4) throw FormatError("RFR1 raw file: payload size does not match header");
  std::vector<RawFrame> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RawFrame f(config);
    for (auto& v : f.data()) v = r.f32();
    frames.push_back(std::move(f));
  }
  return frames;
}

void save_raw_sequence(const fs::path& path, std::span<const RawFrame> frames, const RadarConfig& config) {
  write_file_atomic(path, encode_raw_sequence(frames, config));
}

std::vector<RawFrame> load_raw_sequence(const fs::path& path, const RadarConfig& config) {
  return decode_raw_sequence(read_file(path), config);
}

std::string annotations_csv(std::span<const sim::FrameAnnotation> annotations) {
  std::string out = "frame_index,class,range,velocity,azimuth,elevation\n";
  for (const auto& a : annotations) {
    out += std::to_string(a.frame) + ',' + std::string(class_name(a.label)) + ',' + format_number(a.state.range) +
           ',' + format_number(a.state.velocity) + ',' + format_number(a.state.azimuth) + ',' +
           format_number(a.state.elevation) + '\n';
  }
  return out;
}

std::vector<sim::FrameAnnotation> parse_annotations_csv(std::string_view text) {
  std::vector<sim::FrameAnnotation> out;
  for (const auto& row : parse_csv_rows(text, 6, "annotation csv")) {
    sim::FrameAnnotation a;
    a.frame = to_size(row[0], "annotation frame");
    a.label = to_class(row[1], "annotation class");
    a.hand_present = a.label != GestureClass::Background;
    a.state.range = to_double(row[2], "annotation range");
    a.state.velocity = to_double(row[3], "annotation velocity");
    a.state.azimuth = to_double(row[4], "annotation azimuth");
    a.state.elevation = to_double(row[5], "annotation elevation");
    out.push_back(a);
  }
  return out;
}

std::string features_csv(std::span<const FeatureVector> features) {
  std::string out = "frame,range_m,velocity_mps,azimuth_rad,elevation_rad,magnitude\n";
  for (std::size_t t = 0; t < features.size(); ++t) {
    const auto& f = features[t];
    out += std::to_string(t) + ',' + format_number(f.range) + ',' + format_number(f.velocity) + ',' +
           format_number(f.azimuth) + ',' + format_number(f.elevation) + ',' + format_number(f.magnitude) + '\n';
  }
  return out;
}

std::vector<FeatureVector> parse_features_csv(std::string_view text) {
  std::vector<FeatureVector> out;
  for (const auto& row : parse_csv_rows(text, 6, "feature csv")) {
    out.push_back(FeatureVector{to_double(row[1], "range"), to_double(row[2], "velocity"),
                                to_double(row[3], "azimuth"), to_double(row[4], "elevation"),
                                to_double(row[5], "magnitude")});
  }
  return out;
}

std::string profiles_csv(std::span<const std::vector<double>> profiles) {
  std::string out = "frame";
  const std::size_t bins = profiles.empty() ? 0 : profiles.front().size();
  for (std::size_t b = 0; b < bins; ++b) out += ",bin" + std::to_string(b);
  out += '\n';
  for (std::size_t t = 0; t < profiles.size(); ++t) {
    out += std::to_string(t);
    for (double v : profiles[t]) out += ',' + format_number(v);
    out += '\n';
  }
  return out;
}

std::vector<std::uint8_t> encode_labeled(const dataset::LabeledSequence& seq) {
  seq.validate();
  binary::Writer w;
  w.bytes(kLabeledMagic);
  w.u32(static_cast<std::uint32_t>(seq.size()));
  for (const auto& f : seq.features) {
    for (double v : f.as_array()) w.f32(static_cast<float>(v));
  }
  for (auto l : seq.labels) w.u8(static_cast<std::uint8_t>(class_index(l)));
  return std::move(w.buffer());
}

dataset::LabeledSequence decode_labeled(std::span<const std::uint8_t> bytes) {
  binary::Reader r(bytes, "LFS1 sequence file");
  if (r.bytes(4) != kLabeledMagic) throw FormatError("LFS1 sequence file: bad magic");
  const std::size_t T = r.u32();
  if (r.remaining() != T * (FeatureVector::kSize * 4 + 1)) {
    throw FormatError("LFS1 sequence file: payload size does not match T = " + std::to_string(T));
  }
  dataset::LabeledSequence seq;
  seq.features.resize(T);
  for (auto& f : seq.features) {
    f.range = r.f32();
    f.velocity = r.f32();
    f.azimuth = r.f32();
    f.elevation = r.f32();
    f.magnitude = r.f32();
  }
  seq.labels.resize(T);
  for (auto& l : seq.labels) {
    const auto v = r.u8();
    if (v >= kNumClasses) throw FormatError("LFS1 sequence file: label " + std::to_string(v) + " out of range");
    l = class_from_index(v);
  }
  return seq;
}

void save_labeled(const fs::path& path, const dataset::LabeledSequence& seq) {
  write_file_atomic(path, encode_labeled(seq));
}

dataset::LabeledSequence load_labeled(const fs::path& path) { return decode_labeled(read_file(path)); }

std::string labels_csv(std::span<const GestureClass> labels) {
  std::string out = "frame,label\n";
  for (std::size_t t = 0; t < labels.size(); ++t) out += std::to_string(t) + ',' + std::string(class_name(labels[t])) + '\n';
  return out;
}

std::string manifest_csv(std::span<const ManifestEntry> entries) {
  std::string out = "path,class,split\n";
  for (const auto& e : entries) out += e.path + ',' + std::string(class_name(e.gesture)) + ',' + e.split + '\n';
  return out;
}

std::vector<ManifestEntry> parse_manifest_csv(std::string_view text) {
  std::vector<ManifestEntry> out;
  for (const auto& row : parse_csv_rows(text, 3, "manifest csv")) {
    out.push_back(ManifestEntry{row[0], to_class(row[1], "manifest class"), row[2]});
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) { return parse_manifest_csv(read_text(path)); }

fs::path resolve_entry(const fs::path& manifest_path, const ManifestEntry& entry) {
  const fs::path p(entry.path);
  return p.is_absolute() ? p : manifest_path.parent_path() / p;
}

std::string probabilities_csv(std::span<const std::array<double, kNumClasses>> probs) {
  std::string out = "frame";
  for (std::size_t c = 0; c < kNumClasses; ++c) out += ",p_" + std::string(class_name(class_from_index(c)));
  out += '\n';
  for (std::size_t t = 0; t < probs.size(); ++t) {
    out += std::to_string(t);
    for (double v : probs[t]) out += ',' + format_number(v);
    out += '\n';
  }
  return out;
}

std::vector<std::array<double, kNumClasses>> parse_probabilities_csv(std::string_view text) {
  std::vector<std::array<double, kNumClasses>> out;
  for (const auto& row : parse_csv_rows(text, kNumClasses + 1, "probability csv")) {
    std::array<double, kNumClasses> p{};
    for (std::size_t c = 0; c < kNumClasses; ++c) p[c] = to_double(row[c + 1], "probability");
    out.push_back(p);
  }
  return out;
}

}  // namespace gesture::io
