#include "stabcert/instance_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace stabcert {

using nlohmann::json;

InputError::InputError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                              : what),
      line_(line),
      column_(column) {}

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find("] "); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw InputError("malformed JSON: " + msg, line, column);
  }
}

const json& member(const json& j, const char* key) {
  if (!j.is_object()) throw InputError("document must be a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing key \"") + key + "\"");
  return *it;
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw InputError(what + " must be a number");
  return j.get<double>();
}

Vector vector_of(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what + "[" + std::to_string(i) + "]");
  return v;
}

Matrix matrix_of(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? (j[0].is_array() ? j[0].size() : 0) : 0;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const Vector r = vector_of(j[i], what + "[" + std::to_string(i) + "]");
    if (static_cast<std::size_t>(r.size()) != cols) throw InputError(what + " has rows of different lengths");
    m.row(static_cast<Eigen::Index>(i)) = r.transpose();
  }
  return m;
}

void expect_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (m.rows() != rows || m.cols() != cols)
    throw InputError(what + " must be " + std::to_string(rows) + "x" + std::to_string(cols));
}

void expect_length(const Vector& v, Eigen::Index n, const std::string& what) {
  if (v.size() != n) throw InputError(what + " must have length " + std::to_string(n));
}

InstanceDocument instance_from(const json& j) {
  const json& jn = member(j, "n");
  if (!jn.is_number_integer() || jn.get<long long>() < 1) throw InputError("n must be a positive integer");
  const auto n = static_cast<Eigen::Index>(jn.get<long long>());
  Matrix D = matrix_of(member(j, "D"), "D");
  Vector c = vector_of(member(j, "c"), "c");
  Matrix A = matrix_of(member(j, "A"), "A");
  Vector b = vector_of(member(j, "b"), "b");
  const double alpha = number(member(j, "alpha"), "alpha");
  expect_shape(D, n, n, "D");
  expect_shape(A, n, n, "A");
  expect_length(c, n, "c");
  expect_length(b, n, "b");
  std::optional<Vector> x_bar;
  if (j.contains("x_bar")) {
    x_bar = vector_of(j["x_bar"], "x_bar");
    expect_length(*x_bar, n, "x_bar");
  }
  try {
    return InstanceDocument{QpInstance(std::move(D), std::move(c), std::move(A), std::move(b), alpha), x_bar};
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

DerivativeSnapshot snapshot_from(const json& j) {
  DerivativeSnapshot s;
  s.x_bar = vector_of(member(j, "x_bar"), "x_bar");
  s.grad_f0 = vector_of(member(j, "grad_f0"), "grad_f0");
  s.hess_xx_f0 = matrix_of(member(j, "hess_xx_f0"), "hess_xx_f0");
  s.F_value = number(member(j, "F_value"), "F_value");
  s.grad_x_F = vector_of(member(j, "grad_x_F"), "grad_x_F");
  s.hess_xx_F = matrix_of(member(j, "hess_xx_F"), "hess_xx_F");
  if (j.contains("qp_structure")) {
    if (!j["qp_structure"].is_boolean()) throw InputError("qp_structure must be a boolean");
    s.qp_structure = j["qp_structure"].get<bool>();
  }
  if (j.contains("activity_scale")) s.activity_scale = number(j["activity_scale"], "activity_scale");
  if (j.contains("hess_wx_f0") || j.contains("grad_w_F") || j.contains("hess_wx_F")) {
    ParameterBlocks blk;
    blk.hess_wx_f0 = matrix_of(member(j, "hess_wx_f0"), "hess_wx_f0");
    blk.grad_w_F = vector_of(member(j, "grad_w_F"), "grad_w_F");
    blk.hess_wx_F = matrix_of(member(j, "hess_wx_F"), "hess_wx_F");
    s.params = std::move(blk);
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return s;
}

}  // namespace

InstanceDocument parse_instance(const std::string& text) { return instance_from(parse_json(text)); }

DerivativeSnapshot parse_snapshot(const std::string& text) { return snapshot_from(parse_json(text)); }

std::variant<InstanceDocument, DerivativeSnapshot> parse_document(const std::string& text) {
  const json j = parse_json(text);
  if (j.is_object() && j.contains("grad_f0")) return snapshot_from(j);
  return instance_from(j);
}

ParameterDelta parse_direction(const std::string& text, Eigen::Index n) {
  const json j = parse_json(text);
  if (!j.is_object()) throw InputError("direction must be a JSON object");
  ParameterDelta d = ParameterDelta::zero(n);
  if (j.contains("D")) {
    d.D = matrix_of(j["D"], "D");
    expect_shape(d.D, n, n, "D");
  }
  if (j.contains("A")) {
    d.A = matrix_of(j["A"], "A");
    expect_shape(d.A, n, n, "A");
  }
  if (j.contains("c")) {
    d.c = vector_of(j["c"], "c");
    expect_length(d.c, n, "c");
  }
  if (j.contains("b")) {
    d.b = vector_of(j["b"], "b");
    expect_length(d.b, n, "b");
  }
  if (j.contains("alpha")) d.alpha = number(j["alpha"], "alpha");
  if (relative_asymmetry(d.D) > QpInstance::kSymmetryLimit || relative_asymmetry(d.A) > QpInstance::kSymmetryLimit)
    throw InputError("direction D and A must be symmetric");
  d.D = 0.5 * (d.D + d.D.transpose());
  d.A = 0.5 * (d.A + d.A.transpose());
  return d;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace stabcert
