#include "bsq/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bsq {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'B', 'S', 'Q', 'C', 'K', 'P', 'T', '1'};

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw std::runtime_error("checkpoint is truncated");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_csv_row(const std::vector<double>& row) {
  std::string line;
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (c) line += ',';
    line += fmt(row[c]);
  }
  return line;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::string text;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) text += ',';
    text += table.header[c];
  }
  text += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::invalid_argument("CSV row width does not match header");
    text += format_csv_row(row);
    text += '\n';
  }
  write_text(path, text);
}

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(slurp(path));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw std::runtime_error("CSV '" + path.string() + "' has no header");
  {
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) t.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (!cell.empty() && end == cell.c_str() + cell.size()) {
        row.push_back(v);
      } else {
        throw std::runtime_error("CSV '" + path.string() + "' line " + std::to_string(lineno) + ": bad number '" +
                                 cell + "'");
      }
    }
    if (row.size() != t.header.size())
      throw std::runtime_error("CSV '" + path.string() + "' line " + std::to_string(lineno) + ": wrong width");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(slurp(path)); }

void write_checkpoint(const fs::path& path, const Checkpoint& c) {
  if (c.theta.size() != static_cast<std::size_t>(c.nx) * static_cast<std::size_t>(c.ny))
    throw std::invalid_argument("checkpoint density size does not match its grid");
  std::string out(kMagic, sizeof kMagic);
  put_u64(out, Checkpoint::version);
  put_u64(out, c.config_hash);
  put_f64(out, c.time);
  put_u64(out, static_cast<std::uint64_t>(c.step));
  put_f64(out, c.window);
  put_u64(out, static_cast<std::uint64_t>(c.xi.size()));
  for (Eigen::Index j = 0; j < c.xi.size(); ++j) put_f64(out, c.xi[j]);
  put_u64(out, static_cast<std::uint64_t>(c.nx));
  put_u64(out, static_cast<std::uint64_t>(c.ny));
  for (double v : c.theta) put_f64(out, v);
  // Write then rename so a crash never leaves a partial checkpoint under the final name.
  const fs::path tmp = path.string() + ".tmp";
  write_text(tmp, out);
  fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const fs::path& path) {
  Reader r(slurp(path));
  if (r.bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
    throw std::runtime_error("'" + path.string() + "' is not a checkpoint");
  const auto version = r.u64();
  if (version != Checkpoint::version)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  c.config_hash = r.u64();
  c.time = r.f64();
  c.step = static_cast<std::int64_t>(r.u64());
  c.window = r.f64();
  const auto m = r.u64();
  if (m > (1ull << 28)) throw std::runtime_error("checkpoint coefficient count is implausible");
  c.xi.resize(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < c.xi.size(); ++j) c.xi[j] = r.f64();
  c.nx = static_cast<int>(r.u64());
  c.ny = static_cast<int>(r.u64());
  if (c.nx <= 0 || c.ny <= 0 || c.nx > (1 << 16) || c.ny > (1 << 16))
    throw std::runtime_error("checkpoint grid size is implausible");
  c.theta.resize(static_cast<std::size_t>(c.nx) * static_cast<std::size_t>(c.ny));
  for (double& v : c.theta) v = r.f64();
  if (!r.done()) throw std::runtime_error("checkpoint has trailing bytes");
  return c;
}

std::string render_svg(const PlotSeries& s) {
  const double w = 640, h = 400, left = 80, right = 20, top = 40, bottom = 50;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
    if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
    if (s.log_y && s.y[k] <= 0.0) continue;
    xs.push_back(s.x[k]);
    ys.push_back(s.log_y ? std::log10(s.y[k]) : s.y[k]);
  }
  if (xs.empty()) throw std::invalid_argument("nothing to plot for '" + s.title + "'");
  double x0 = *std::min_element(xs.begin(), xs.end()), x1 = *std::max_element(xs.begin(), xs.end());
  double y0 = *std::min_element(ys.begin(), ys.end()), y1 = *std::max_element(ys.begin(), ys.end());
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << s.title << "</text>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << h - bottom + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << xv << "</text>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << (s.log_y ? "1e" : "") << yv << "</text>\n";
  }
  o << "<text x=\"" << w / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\" font-size=\"12\">" << s.xlabel
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << h / 2 << "\" transform=\"rotate(-90 16 " << h / 2
    << ")\" text-anchor=\"middle\" font-size=\"12\">" << s.ylabel << (s.log_y ? " (log10)" : "") << "</text>\n";
  o << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < xs.size(); ++k) o << px(xs[k]) << ',' << py(ys[k]) << ' ';
  o << "\"/>\n";
  if (!s.annotation.empty())
    o << "<text x=\"" << w - right - 4 << "\" y=\"" << top + 14 << "\" text-anchor=\"end\" font-size=\"12\">"
      << s.annotation << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace bsq
