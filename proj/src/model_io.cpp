#include "spherecover/model_io.hpp"

#include <openssl/sha.h>

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spherecover/errors.hpp"

namespace spherecover {

namespace {

using nlohmann::json;

std::string where(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::vector<std::string> labels(const json& j, const char* key, std::string_view origin) {
  if (!j.is_array()) throw validation_error(std::string(origin) + ": \"" + key + "\" must be an array of labels");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (v.is_string())
      out.push_back(v.get<std::string>());
    else if (v.is_number_integer())
      out.push_back(std::to_string(v.get<long long>()));
    else
      throw validation_error(std::string(origin) + ": \"" + key + "\" entries must be strings");
  }
  return out;
}

std::vector<double> numbers(const json& j, const std::string& key, std::string_view origin) {
  if (!j.is_array()) throw validation_error(std::string(origin) + ": \"" + key + "\" must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw validation_error(std::string(origin) + ": \"" + key + "\"[" + std::to_string(i) + "] is not a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

Model model_from_json(const nlohmann::json& j, std::string_view origin);

}  // namespace

Model parse_model(std::string_view text, std::string_view origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string(origin) + ": JSON syntax error at " + where(text, e.byte == 0 ? 0 : e.byte - 1) +
                           ": " + e.what());
  }
  try {
    return model_from_json(j, origin);
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind(std::string(origin) + ":", 0) == 0) throw;
    throw Error(e.kind(), std::string(origin) + ": " + what);
  }
}

namespace {

Model model_from_json(const nlohmann::json& j, std::string_view origin) {
  if (!j.is_object()) throw validation_error(std::string(origin) + ": model must be a JSON object");
  for (const char* key : {"source_alphabet", "P", "M", "rho"})
    if (!j.contains(key)) throw validation_error(std::string(origin) + ": missing field \"" + key + "\"");

  Alphabet source(labels(j["source_alphabet"], "source_alphabet", origin));
  Alphabet reproduction =
      j.contains("reproduction_alphabet") ? Alphabet(labels(j["reproduction_alphabet"], "reproduction_alphabet", origin))
                                          : source;
  std::vector<double> p = numbers(j["P"], "P", origin);

  std::vector<double> m;
  const json& mj = j["M"];
  if (mj.is_string()) {
    const auto name = mj.get<std::string>();
    if (name == "counting") {
      m.assign(reproduction.size(), 1.0);
    } else if (name == "P") {
      if (!(reproduction == source))
        throw validation_error(std::string(origin) + ": \"M\": \"P\" requires identical alphabets");
      m = p;
    } else {
      throw validation_error(std::string(origin) + ": unknown mass shorthand \"" + name + "\"");
    }
  } else {
    m = numbers(mj, "M", origin);
  }

  DistortionMatrix rho;
  const json& rj = j["rho"];
  if (rj.is_string()) {
    if (rj.get<std::string>() != "hamming")
      throw validation_error(std::string(origin) + ": unknown distortion shorthand \"" + rj.get<std::string>() + "\"");
    rho = DistortionMatrix::hamming(source, reproduction);
  } else {
    if (!rj.is_array()) throw validation_error(std::string(origin) + ": \"rho\" must be a matrix or \"hamming\"");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rj.size(); ++i) rows.push_back(numbers(rj[i], "rho[" + std::to_string(i) + "]", origin));
    rho = DistortionMatrix(rows);
  }

  ValidateOptions options;
  if (j.contains("auto_normalize_rho")) {
    if (!j["auto_normalize_rho"].is_boolean())
      throw validation_error(std::string(origin) + ": \"auto_normalize_rho\" must be a boolean");
    options.normalize_rho = j["auto_normalize_rho"].get<bool>();
  }
  return validate_model(std::move(source), std::move(reproduction), std::move(p), std::move(m), std::move(rho),
                        options);
}

}  // namespace

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open model file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str(), path.string());
}

std::string canonical_json(const Model& model) {
  json j;
  j["source_alphabet"] = model.source_alphabet().labels();
  j["reproduction_alphabet"] = model.reproduction_alphabet().labels();
  j["P"] = std::vector<double>(model.P().values().begin(), model.P().values().end());
  j["M"] = std::vector<double>(model.M().values().begin(), model.M().values().end());
  std::vector<std::vector<double>> rows;
  for (std::size_t x = 0; x < model.rho().rows(); ++x) {
    const auto r = model.rho().row(x);
    rows.emplace_back(r.begin(), r.end());
  }
  j["rho"] = rows;
  return j.dump();
}

std::string model_hash(const Model& model) { return sha256_prefix(canonical_json(model)); }

std::string sha256_prefix(std::string_view bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 8; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

}  // namespace spherecover
