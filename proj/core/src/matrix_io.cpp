#include "rankone/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rankone/error.hpp"

namespace rankone {

namespace {

double parse_double(const std::string& s, const std::string& context) {
  if (s.empty()) fail(ErrorCode::kInvalidArgument, context + ": empty number");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, context + ": cannot parse '" + s + "'");
  }
  if (used != s.size()) fail(ErrorCode::kInvalidArgument, context + ": trailing text in '" + s + "'");
  return v;
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Complex parse_complex(const std::string& token) {
  if (token.empty() || (token.back() != 'j' && token.back() != 'i'))
    return {parse_double(token, "complex entry"), 0.0};
  const std::string body = token.substr(0, token.size() - 1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_double(body, "complex entry")};
  const double re = parse_double(body.substr(0, split), "complex entry");
  std::string im = body.substr(split);
  if (im == "+" || im == "-") im += "1";
  return {re, parse_double(im, "complex entry")};
}

std::string format_complex(Complex z) {
  std::string im = shortest(z.imag());
  if (im[0] != '-') im = "+" + im;
  return shortest(z.real()) + im + "j";
}

AnyMatrix read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) fail(ErrorCode::kInvalidArgument, "matrix: missing header line");
  std::istringstream hs(header);
  long long rows = -1, cols = -1;
  std::string field;
  if (!(hs >> rows >> cols >> field) || rows < 1 || cols < 1)
    fail(ErrorCode::kInvalidArgument, "matrix: header must be 'N n field' with N, n >= 1");
  if (field != "real" && field != "complex")
    fail(ErrorCode::kInvalidArgument, "matrix: field must be 'real' or 'complex', got '" + field + "'");
  ComplexMatrix m(rows, cols);
  std::string line;
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      fail(ErrorCode::kInvalidArgument, "matrix: expected " + std::to_string(rows) + " rows, got " +
                                            std::to_string(i));
    std::istringstream ls(line);
    std::string tok;
    long long j = 0;
    while (ls >> tok) {
      if (j >= cols) fail(ErrorCode::kInvalidArgument, "matrix: row " + std::to_string(i + 1) + " has too many entries");
      m(i, j++) = field == "real" ? Complex(parse_double(tok, "matrix row " + std::to_string(i + 1)), 0.0)
                                  : parse_complex(tok);
    }
    if (j != cols)
      fail(ErrorCode::kInvalidArgument, "matrix: row " + std::to_string(i + 1) + " has " +
                                            std::to_string(j) + " entries, expected " + std::to_string(cols));
  }
  if (!m.allFinite()) fail(ErrorCode::kInvalidArgument, "matrix: non-finite entry");
  if (field == "real") return RealMatrix(m.real());
  return m;
}

AnyMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const RealMatrix& m) {
  out << m.rows() << ' ' << m.cols() << " real\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << shortest(m(i, j));
    out << '\n';
  }
}

void write_matrix(std::ostream& out, const ComplexMatrix& m) {
  out << m.rows() << ' ' << m.cols() << " complex\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_complex(m(i, j));
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const AnyMatrix& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path + "'");
  std::visit([&](const auto& mat) { write_matrix(out, mat); }, m);
}

template <typename Scalar>
std::string measurement_to_json(const MeasurementSet<Scalar>& m) {
  nlohmann::json j;
  j["frame_id"] = m.frame_id;
  j["b"] = std::vector<double>(m.b.data(), m.b.data() + m.b.size());
  if (m.snr_db) j["snr_db"] = *m.snr_db;
  if (m.ground_truth) {
    auto& g = j["ground_truth"] = nlohmann::json::array();
    for (Index i = 0; i < m.ground_truth->size(); ++i) {
      if constexpr (kIsComplex<Scalar>) g.push_back(format_complex((*m.ground_truth)(i)));
      else g.push_back((*m.ground_truth)(i));
    }
  }
  return j.dump();
}

MeasurementSet<double> measurement_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("measurement json: ") + e.what());
  }
  if (!j.contains("b") || !j["b"].is_array())
    fail(ErrorCode::kInvalidArgument, "measurement json: field 'b' must be an array");
  MeasurementSet<double> m;
  const auto values = j["b"].get<std::vector<double>>();
  m.b = Eigen::Map<const RealVector>(values.data(), static_cast<Index>(values.size()));
  if ((m.b.array() < 0).any()) fail(ErrorCode::kInvalidArgument, "measurement json: field 'b' has a negative entry");
  m.b_sq = m.b.cwiseAbs2();
  if (j.contains("frame_id")) m.frame_id = j["frame_id"].get<std::string>();
  if (j.contains("snr_db")) m.snr_db = j["snr_db"].get<double>();
  return m;
}

template std::string measurement_to_json<double>(const MeasurementSet<double>&);
template std::string measurement_to_json<Complex>(const MeasurementSet<Complex>&);

}  // namespace rankone
