#include "wsaa/error.hpp"
#include "wsaa/simulate.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace wsaa {

namespace {

void
write_double(std::ostream& out, double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

std::vector<std::string>
split_fields(const std::string& line)
{
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

double
parse_double(const std::string& s, std::size_t line_no)
{
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+')
    ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw InvalidArgument("line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
  return v;
}

} // namespace

void
write_dataset_csv(const Dataset& data, std::ostream& out)
{
  const Eigen::Index dx = data.X.cols();
  const Eigen::Index dy = data.Y.cols();
  if (data.X.rows() != data.Y.rows())
    throw InvalidArgument("dataset has mismatched covariate and outcome row counts");
  for (Eigen::Index j = 0; j < dx; ++j)
    out << (j ? "," : "") << 'x' << (j + 1);
  for (Eigen::Index j = 0; j < dy; ++j)
    out << ',' << 'y' << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < dx; ++j) {
      if (j)
        out << ',';
      write_double(out, data.X(i, j));
    }
    for (Eigen::Index j = 0; j < dy; ++j) {
      out << ',';
      write_double(out, data.Y(i, j));
    }
    out << '\n';
  }
}

void
save_dataset_csv(const Dataset& data, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InvalidArgument("cannot open '" + path + "' for writing");
  write_dataset_csv(data, out);
}

Dataset
read_dataset_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line))
    throw InvalidArgument("dataset CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);
  const auto header = split_fields(line);

  int dx = 0, dy = 0;
  for (const auto& name : header) {
    const bool is_x = !name.empty() && name[0] == 'x';
    const bool is_y = !name.empty() && name[0] == 'y';
    const std::string expect = is_x ? "x" + std::to_string(dx + 1) : "y" + std::to_string(dy + 1);
    if ((!is_x && !is_y) || name != expect || (is_x && dy > 0))
      throw InvalidArgument("dataset header must be x1,..,x{d_x},y1,..,y{d_y}; got '" + name + "'");
    (is_x ? dx : dy) += 1;
  }
  if (dx == 0 || dy == 0)
    throw InvalidArgument("dataset header needs at least one x and one y column");

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r")
      continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                            " fields");
    for (const auto& f : fields)
      values.push_back(parse_double(f, line_no));
    ++rows;
  }
  if (rows == 0)
    throw InvalidArgument("dataset CSV has no samples");

  Dataset data{ Eigen::MatrixXd(static_cast<Eigen::Index>(rows), dx),
                Eigen::MatrixXd(static_cast<Eigen::Index>(rows), dy) };
  const std::size_t width = header.size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (int j = 0; j < dx; ++j)
      data.X(static_cast<Eigen::Index>(i), j) = values[i * width + j];
    for (int j = 0; j < dy; ++j)
      data.Y(static_cast<Eigen::Index>(i), j) = values[i * width + dx + j];
  }
  return data;
}

Dataset
load_dataset_csv(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InvalidArgument("cannot open dataset '" + path + "'");
  return read_dataset_csv(in);
}

} // namespace wsaa
