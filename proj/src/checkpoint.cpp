#include <cmath>
#include <fstream>
#include <sstream>

#include "rrnet/error.hpp"
#include "rrnet/format.hpp"
#include "rrnet/network.hpp"

namespace rrnet {

std::string checkpoint_to_string(const NetworkSpec& spec, const ParamVector& theta) {
  check_params(spec, theta);
  std::string out = spec.descriptor() + "\n" + std::to_string(theta.size()) + "\n";
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    if (!std::isfinite(theta[k])) throw NumericError("refusing to checkpoint non-finite parameter " + std::to_string(k));
    out += format_double(theta[k], 17);
    out += '\n';
  }
  return out;
}

Checkpoint checkpoint_from_string(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, 0, "missing network descriptor");
  Checkpoint ck;
  try {
    ck.spec = NetworkSpec::parse_descriptor(std::string(trim(line)));
  } catch (const Error& e) {
    throw ParseError(source, 1, 0, e.what());
  }
  if (!std::getline(in, line)) throw ParseError(source, 2, 0, "missing parameter count");
  auto d = parse_int<std::size_t>(line);
  if (!d) throw ParseError(source, 2, 0, "bad parameter count '" + line + "'");
  if (*d != ck.spec.param_count())
    throw ParseError(source, 2, 0, "parameter count " + std::to_string(*d) + " does not match descriptor (" +
                                       std::to_string(ck.spec.param_count()) + ")");
  ck.theta.resize(static_cast<Eigen::Index>(*d));
  for (std::size_t k = 0; k < *d; ++k) {
    if (!std::getline(in, line)) throw ParseError(source, k + 3, 0, "unexpected end of file");
    auto v = parse_double(line);
    if (!v || !std::isfinite(*v)) throw ParseError(source, k + 3, 0, "bad parameter value '" + line + "'");
    ck.theta[static_cast<Eigen::Index>(k)] = *v;
  }
  while (std::getline(in, line))
    if (!trim(line).empty()) throw ParseError(source, *d + 3, 0, "trailing content after parameters");
  return ck;
}

void save_checkpoint(const std::string& path, const NetworkSpec& spec, const ParamVector& theta) {
  const std::string text = checkpoint_to_string(spec, theta);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str(), path);
}

}  // namespace rrnet
