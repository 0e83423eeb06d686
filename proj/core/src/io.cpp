#include <sensorsel/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>
#include <zlib.h>

#include <sensorsel/errors.hpp>
#include <sensorsel/format.hpp>

#ifndef SENSORSEL_VERSION
#define SENSORSEL_VERSION "0.0.0"
#endif

namespace sensorsel {

namespace fs = std::filesystem;

std::string_view library_version() noexcept { return SENSORSEL_VERSION; }

namespace {

bool is_gz(const fs::path& path) { return path.extension() == ".gz"; }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<long long> parse_int(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

void check_meta_text(std::string_view s, bool is_key) {
  if (s.find('\n') != std::string_view::npos || s.find('\r') != std::string_view::npos ||
      (is_key && (s.empty() || s.find('=') != std::string_view::npos))) {
    throw InvalidArgument("metadata keys and values must be single-line (keys without '=')");
  }
}

}  // namespace

std::string read_text(const fs::path& path) {
  if (is_gz(path)) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) throw InvalidArgument("cannot open '" + path.string() + "'");
    std::string out;
    char buf[1 << 16];
    for (;;) {
      const int got = gzread(f, buf, sizeof buf);
      if (got < 0) {
        gzclose(f);
        throw ParseError("corrupt gzip stream in '" + path.string() + "'", 0);
      }
      if (got == 0) break;
      out.append(buf, static_cast<std::size_t>(got));
    }
    gzclose(f);
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (is_gz(path)) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (f == nullptr) throw InvalidArgument("cannot write '" + path.string() + "'");
    std::size_t done = 0;
    while (done < text.size()) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(text.size() - done, 1u << 30));
      if (gzwrite(f, text.data() + done, chunk) != static_cast<int>(chunk)) {
        gzclose(f);
        throw InvalidArgument("write failed for '" + path.string() + "'");
      }
      done += chunk;
    }
    if (gzclose(f) != Z_OK) throw InvalidArgument("write failed for '" + path.string() + "'");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
}

std::string format_matrix(const MatrixFile& file) {
  check_meta_text(file.kind, false);
  const bool cplx = file.is_complex();
  const Index rows = cplx ? std::get<Eigen::MatrixXcd>(file.data).rows()
                          : std::get<Eigen::MatrixXd>(file.data).rows();
  const Index cols = cplx ? std::get<Eigen::MatrixXcd>(file.data).cols()
                          : std::get<Eigen::MatrixXd>(file.data).cols();
  std::string out;
  out.reserve(static_cast<std::size_t>(rows * cols * (cplx ? 2 : 1) * 24 + 128));
  out += "# rows=" + std::to_string(rows) + "\n";
  out += "# cols=" + std::to_string(cols) + "\n";
  out += cplx ? "# complex=true\n" : "# complex=false\n";
  out += "# kind=" + file.kind + "\n";
  for (const auto& [k, v] : file.metadata) {
    check_meta_text(k, true);
    check_meta_text(v, false);
    out += "# meta." + k + "=" + v + "\n";
  }
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (j) out += ',';
      if (cplx) {
        const Complex z = std::get<Eigen::MatrixXcd>(file.data)(i, j);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          throw InvalidArgument("cannot save non-finite matrix entries");
        }
        out += format_double(z.real());
        out += ',';
        out += format_double(z.imag());
      } else {
        const double v = std::get<Eigen::MatrixXd>(file.data)(i, j);
        if (!std::isfinite(v)) throw InvalidArgument("cannot save non-finite matrix entries");
        out += format_double(v);
      }
    }
    out += '\n';
  }
  return out;
}

MatrixFile parse_matrix(std::string_view text) {
  std::optional<long long> rows;
  std::optional<long long> cols;
  std::optional<bool> cplx;
  MatrixFile file;
  std::vector<double> values;
  long long data_rows = 0;
  bool in_data = false;
  std::size_t line_no = 0;
  std::size_t fields = 0;

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '#') {
      if (in_data) throw ParseError("header line after data", line_no);
      const std::string_view body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;  // free comment
      const std::string_view key = trim(body.substr(0, eq));
      const std::string_view value = trim(body.substr(eq + 1));
      if (key == "rows" || key == "cols") {
        const auto v = parse_int(value);
        if (!v || *v < 1 || *v > (1LL << 31)) {
          throw ParseError("invalid " + std::string(key) + " '" + std::string(value) + "'", line_no);
        }
        (key == "rows" ? rows : cols) = *v;
      } else if (key == "complex") {
        if (value == "true") {
          cplx = true;
        } else if (value == "false") {
          cplx = false;
        } else {
          throw ParseError("complex must be true or false", line_no);
        }
      } else if (key == "kind") {
        file.kind = std::string(value);
      } else if (key.substr(0, 5) == "meta." && key.size() > 5) {
        file.metadata[std::string(key.substr(5))] = std::string(value);
      } else {
        throw ParseError("unknown header key '" + std::string(key) + "'", line_no);
      }
      continue;
    }

    if (!in_data) {
      if (!rows || !cols) throw ParseError("data before rows= and cols= headers", line_no);
      if (!cplx) cplx = false;
      fields = static_cast<std::size_t>(*cols) * (*cplx ? 2 : 1);
      values.reserve(std::min<std::size_t>(static_cast<std::size_t>(*rows) * fields, 1u << 24));
      in_data = true;
    }
    if (data_rows >= *rows) {
      throw ParseError("more data rows than the declared rows=" + std::to_string(*rows), line_no);
    }
    const auto parts = split(line, ',');
    if (parts.size() != fields) {
      throw ParseError("expected " + std::to_string(fields) + " fields, found " +
                           std::to_string(parts.size()),
                       line_no);
    }
    for (const auto part : parts) {
      const auto v = parse_double(part);
      if (!v) throw ParseError("invalid number '" + std::string(trim(part)) + "'", line_no);
      values.push_back(*v);
    }
    ++data_rows;
  }
  if (!rows || !cols) throw ParseError("missing rows= or cols= header", line_no);
  if (data_rows != *rows) {
    throw ParseError("declared rows=" + std::to_string(*rows) + " but found " +
                         std::to_string(data_rows) + " data rows",
                     line_no);
  }

  const auto r = static_cast<Index>(*rows);
  const auto c = static_cast<Index>(*cols);
  if (*cplx) {
    Eigen::MatrixXcd m(r, c);
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c; ++j) {
        const auto k = static_cast<std::size_t>(i * 2 * c + 2 * j);
        m(i, j) = Complex(values[k], values[k + 1]);
      }
    }
    file.data = std::move(m);
  } else {
    Eigen::MatrixXd m(r, c);
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c; ++j) m(i, j) = values[static_cast<std::size_t>(i * c + j)];
    }
    file.data = std::move(m);
  }
  return file;
}

MatrixFile load_matrix_file(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return parse_matrix(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void save_matrix_file(const fs::path& path, const MatrixFile& file) {
  write_text(path, format_matrix(file));
}

Eigen::MatrixXd load_matrix(const fs::path& path) {
  MatrixFile f = load_matrix_file(path);
  if (f.is_complex()) throw ParseError(path.string() + ": expected a real matrix", 0);
  return std::get<Eigen::MatrixXd>(std::move(f.data));
}

void save_matrix(const fs::path& path, const Eigen::MatrixXd& m, std::string kind) {
  MatrixFile f;
  f.data = m;
  f.kind = std::move(kind);
  save_matrix_file(path, f);
}

void save_matrix(const fs::path& path, const Eigen::MatrixXcd& m, std::string kind) {
  MatrixFile f;
  f.data = m;
  f.kind = std::move(kind);
  save_matrix_file(path, f);
}

Eigen::VectorXd load_vector(const fs::path& path) {
  const Eigen::MatrixXd m = load_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParseError(path.string() + ": expected a single row or column", 0);
}

Basis load_basis(const fs::path& path) {
  MatrixFile f = load_matrix_file(path);
  BasisKind kind = BasisKind::analytic;
  Provenance meta(f.metadata.begin(), f.metadata.end());
  if (f.kind != "matrix") {
    try {
      kind = basis_kind_from_string(f.kind);
    } catch (const InvalidArgument&) {
      throw ParseError(path.string() + ": unknown basis kind '" + f.kind + "'", 4);
    }
  } else {
    meta.emplace("source", path.filename().string());
  }
  if (f.is_complex()) return Basis(std::get<Eigen::MatrixXcd>(std::move(f.data)), kind, meta);
  return Basis(std::get<Eigen::MatrixXd>(std::move(f.data)), kind, meta);
}

void save_basis(const fs::path& path, const Basis& basis) {
  MatrixFile f;
  if (basis.is_complex()) {
    f.data = std::get<Eigen::MatrixXcd>(basis.modes());
  } else {
    f.data = basis.real_modes();
  }
  f.kind = std::string(to_string(basis.kind()));
  f.metadata.insert(basis.provenance().begin(), basis.provenance().end());
  save_matrix_file(path, f);
}

std::vector<Index> parse_index_list(std::string_view text) {
  std::vector<Index> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string token;
    auto flush = [&] {
      if (token.empty()) return;
      const auto v = parse_int(token);
      if (!v || *v < 0) throw ParseError("invalid index '" + token + "'", line_no);
      out.push_back(static_cast<Index>(*v));
      token.clear();
    };
    for (const char ch : line) {
      if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r' || ch == ';') {
        flush();
      } else {
        token += ch;
      }
    }
    flush();
  }
  return out;
}

std::vector<Index> load_index_list(const fs::path& path) {
  try {
    return parse_index_list(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void save_dmd_model(const fs::path& dir, const DMDModel& model) {
  fs::create_directories(dir);
  save_matrix(dir / "modes_re.csv", Eigen::MatrixXd(model.modes.real()), "dmd-modes-re");
  save_matrix(dir / "modes_im.csv", Eigen::MatrixXd(model.modes.imag()), "dmd-modes-im");
  std::string eig = "re,im,omega_re,omega_im,amp_re,amp_im\n";
  for (Index i = 0; i < model.rank(); ++i) {
    eig += format_double(model.lambda(i).real()) + ',' + format_double(model.lambda(i).imag()) + ',' +
           format_double(model.omega(i).real()) + ',' + format_double(model.omega(i).imag()) + ',' +
           format_double(model.amplitudes(i).real()) + ',' +
           format_double(model.amplitudes(i).imag()) + '\n';
  }
  write_text(dir / "eigenvalues.csv", eig);
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "dt" << YAML::Value << format_double(model.dt);
  out << YAML::Key << "r" << YAML::Value << model.rank();
  out << YAML::Key << "n" << YAML::Value << model.states();
  out << YAML::Key << "m" << YAML::Value << model.snapshots;
  out << YAML::EndMap;
  write_text(dir / "meta.yaml", std::string(out.c_str()) + "\n");
}

DMDModel load_dmd_model(const fs::path& dir) {
  DMDModel model;
  YAML::Node meta;
  try {
    meta = YAML::Load(read_text(dir / "meta.yaml"));
  } catch (const YAML::Exception& e) {
    throw ParseError((dir / "meta.yaml").string() + ": " + e.what(), e.mark.line + 1);
  }
  Index r = 0;
  Index n = 0;
  try {
    const auto dt = parse_double(meta["dt"].as<std::string>());
    if (!dt || !(*dt > 0.0)) throw ParseError("meta.yaml: dt must be positive", 0);
    model.dt = *dt;
    r = meta["r"].as<Index>();
    n = meta["n"].as<Index>();
    model.snapshots = meta["m"].as<Index>();
  } catch (const YAML::Exception& e) {
    throw ParseError((dir / "meta.yaml").string() + ": missing or invalid field", 0);
  }
  const Eigen::MatrixXd re = load_matrix(dir / "modes_re.csv");
  const Eigen::MatrixXd im = load_matrix(dir / "modes_im.csv");
  if (re.rows() != n || re.cols() != r || im.rows() != n || im.cols() != r) {
    throw ParseError("DMD mode files do not match meta.yaml dimensions", 0);
  }
  model.modes = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();

  const std::string eig = read_text(dir / "eigenvalues.csv");
  std::size_t line_no = 0;
  std::size_t pos = 0;
  Index row = 0;
  model.lambda.resize(r);
  model.omega.resize(r);
  model.amplitudes.resize(r);
  while (pos < eig.size()) {
    auto end = eig.find('\n', pos);
    if (end == std::string::npos) end = eig.size();
    const std::string_view line = trim(std::string_view(eig).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "re,im,omega_re,omega_im,amp_re,amp_im") {
        throw ParseError("eigenvalues.csv: unexpected header", line_no);
      }
      continue;
    }
    const auto parts = split(line, ',');
    if (parts.size() != 6 || row >= r) throw ParseError("eigenvalues.csv: malformed row", line_no);
    double v[6];
    for (int k = 0; k < 6; ++k) {
      const auto x = parse_double(parts[static_cast<std::size_t>(k)]);
      if (!x) throw ParseError("eigenvalues.csv: invalid number", line_no);
      v[k] = *x;
    }
    model.lambda(row) = Complex(v[0], v[1]);
    model.omega(row) = Complex(v[2], v[3]);
    model.amplitudes(row) = Complex(v[4], v[5]);
    ++row;
  }
  if (row != r) throw ParseError("eigenvalues.csv: expected " + std::to_string(r) + " rows", line_no);
  model.nyquist_adjacent.assign(static_cast<std::size_t>(r), false);
  for (Index i = 0; i < r; ++i) {
    model.nyquist_adjacent[static_cast<std::size_t>(i)] =
        std::abs(std::arg(model.lambda(i))) > 3.141592653589793 - 1e-6;
  }
  return model;
}

std::vector<double> parse_gamma_grid(std::string_view text) {
  text = trim(text);
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw InvalidArgument("gamma grid must be start:stop:count");
    const auto start = parse_double(parts[0]);
    const auto stop = parse_double(parts[1]);
    const auto count = parse_int(parts[2]);
    if (!start || !stop || !count || *count < 1) {
      throw InvalidArgument("gamma grid must be start:stop:count with count >= 1");
    }
    for (long long i = 0; i < *count; ++i) {
      out.push_back(*count == 1 ? *start
                                : *start + (*stop - *start) * static_cast<double>(i) /
                                               static_cast<double>(*count - 1));
    }
  } else {
    for (const auto part : split(text, ',')) {
      const auto v = parse_double(part);
      if (!v) throw InvalidArgument("invalid gamma value '" + std::string(trim(part)) + "'");
      out.push_back(*v);
    }
  }
  for (const double g : out) {
    if (!(g >= 0.0)) throw InvalidArgument("gamma values must be non-negative");
  }
  return out;
}

namespace {

YAML::Node load_yaml(std::string_view text, const std::string& what) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(what + ": " + e.msg, static_cast<std::size_t>(e.mark.line + 1));
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view yaml, const fs::path& base_dir) {
  const YAML::Node root = load_yaml(yaml, "config");
  if (!root.IsMap()) throw ParseError("config: top level must be a mapping", 1);
  ExperimentConfig cfg;
  auto line_of = [](const YAML::Node& n) { return static_cast<std::size_t>(n.Mark().line + 1); };
  try {
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      const YAML::Node& v = kv.second;
      if (key == "data") {
        cfg.data = resolve(base_dir, v.IsMap() ? v["path"].as<std::string>() : v.as<std::string>());
      } else if (key == "basis") {
        if (v.IsMap()) {
          if (v["kind"]) cfg.basis_kind = v["kind"].as<std::string>();
          if (v["rank"]) cfg.rank = v["rank"].as<Index>();
          if (v["oversample"]) cfg.oversample = v["oversample"].as<Index>();
          if (v["dt"]) cfg.dt = v["dt"].as<double>();
        } else {
          cfg.basis_kind = v.as<std::string>();
        }
      } else if (key == "cost") {
        if (v.IsMap()) {
          if (v["path"]) {
            cfg.cost = resolve(base_dir, v["path"].as<std::string>());
          } else if (v["builtin"] && v["builtin"].as<std::string>() != "zero") {
            throw InvalidArgument("unknown builtin cost '" + v["builtin"].as<std::string>() + "'");
          }
        } else {
          cfg.cost = resolve(base_dir, v.as<std::string>());
        }
      } else if (key == "restrict") {
        cfg.restrict_to = resolve(base_dir, v.as<std::string>());
      } else if (key == "gammas") {
        if (v.IsSequence()) {
          cfg.gammas.clear();
          for (const auto& g : v) cfg.gammas.push_back(g.as<double>());
        } else {
          cfg.gammas = parse_gamma_grid(v.as<std::string>());
        }
      } else if (key == "p") {
        cfg.p = v.as<Index>();
      } else if (key == "trials") {
        cfg.trials = v.as<Index>();
      } else if (key == "seed") {
        cfg.seed = v.as<std::uint64_t>();
      } else if (key == "output_dir") {
        cfg.output_dir = resolve(base_dir, v.as<std::string>());
      } else {
        throw ParseError("config: unknown key '" + key + "'", line_of(kv.first));
      }
    }
  } catch (const YAML::Exception& e) {
    throw ParseError("config: " + e.msg, static_cast<std::size_t>(e.mark.line + 1));
  }

  if (cfg.data.empty()) throw InvalidArgument("config: 'data' is required");
  if (!fs::exists(cfg.data)) throw InvalidArgument("config: data file '" + cfg.data.string() + "' not found");
  if (cfg.cost && !fs::exists(*cfg.cost)) {
    throw InvalidArgument("config: cost file '" + cfg.cost->string() + "' not found");
  }
  if (cfg.restrict_to && !fs::exists(*cfg.restrict_to)) {
    throw InvalidArgument("config: restrict file '" + cfg.restrict_to->string() + "' not found");
  }
  basis_kind_from_string(cfg.basis_kind);
  if (cfg.gammas.empty()) throw InvalidArgument("config: gamma grid is empty");
  for (const double g : cfg.gammas) {
    if (!std::isfinite(g) || g < 0.0) throw InvalidArgument("config: gamma values must be non-negative");
  }
  if (cfg.p < 1) throw InvalidArgument("config: p must be >= 1");
  if (cfg.rank < 0 || cfg.oversample < 0 || cfg.trials < 0) {
    throw InvalidArgument("config: rank, oversample and trials must be non-negative");
  }
  if (!(cfg.dt > 0.0)) throw InvalidArgument("config: basis.dt must be positive");
  return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  return parse_experiment_config(read_text(path), path.parent_path());
}

std::string format_manifest(const RunManifest& m) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "command" << YAML::Value << m.command;
  out << YAML::Key << "name" << YAML::Value << m.name;
  out << YAML::Key << "seed" << YAML::Value << m.seed;
  out << YAML::Key << "version" << YAML::Value << m.version;
  out << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : m.parameters) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
  out << YAML::EndMap;
  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : m.outputs) out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

RunManifest parse_manifest(std::string_view yaml) {
  const YAML::Node root = load_yaml(yaml, "manifest");
  RunManifest m;
  try {
    if (!root.IsMap() || !root["command"] || !root["name"]) {
      throw ParseError("manifest: 'command' and 'name' are required", 1);
    }
    m.command = root["command"].as<std::string>();
    m.name = root["name"].as<std::string>();
    if (root["seed"]) m.seed = root["seed"].as<std::uint64_t>();
    if (root["version"]) m.version = root["version"].as<std::string>();
    if (const auto p = root["parameters"]) {
      for (const auto& kv : p) m.parameters[kv.first.as<std::string>()] = kv.second.as<std::string>();
    }
    if (const auto o = root["outputs"]) {
      for (const auto& kv : o) m.outputs[kv.first.as<std::string>()] = kv.second.as<std::string>();
    }
  } catch (const YAML::Exception& e) {
    throw ParseError("manifest: " + e.msg, static_cast<std::size_t>(e.mark.line + 1));
  }
  return m;
}

void save_manifest(const fs::path& path, const RunManifest& manifest) {
  write_text(path, format_manifest(manifest));
}

RunManifest load_manifest(const fs::path& path) { return parse_manifest(read_text(path)); }

std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace sensorsel
