#include "io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "collapse/error.hpp"
#include "collapse/families.hpp"

namespace collapse::cli {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct CsvRows {
  std::map<std::string, std::size_t> columns;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

CsvRows read_csv(const std::string& text, const std::vector<std::string>& required) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  CsvRows csv;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!header) {
      for (std::size_t k = 0; k < fields.size(); ++k) csv.columns[fields[k]] = k;
      for (const auto& r : required)
        if (!csv.columns.count(r)) throw InputError("line " + std::to_string(number) + ": header lacks column '" + r + "'");
      header = true;
      continue;
    }
    if (fields.size() != csv.columns.size()) {
      throw InputError("line " + std::to_string(number) + ": expected " + std::to_string(csv.columns.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    csv.rows.emplace_back(number, std::move(fields));
  }
  if (!header) throw InputError("empty CSV: no header line");
  if (csv.rows.empty()) throw InputError("CSV has a header but no data rows");
  return csv;
}

double parse_double(const std::string& s, std::size_t line, const char* column) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw InputError("line " + std::to_string(line) + ": column " + column + ": not a finite number: '" + s + "'");
  return v;
}

Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

std::vector<double> flatten(const Json& j, const char* name) {
  std::vector<double> out;
  auto walk = [&](const auto& self, const Json& node) -> void {
    if (node.is_array()) {
      for (const auto& e : node) self(self, e);
    } else if (node.is_number()) {
      out.push_back(node.get<double>());
    } else {
      throw InputError(std::string("grid array ") + name + " holds a non-number");
    }
  };
  walk(walk, j);
  return out;
}

std::vector<double> numbers(const Json& j, const char* name) {
  if (!j.is_array()) throw InputError(std::string(name) + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw InputError(std::string(name) + " must be an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

ParamMap param_map(const Json& j) {
  ParamMap p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw InputError("\"params\" must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw InputError("parameter '" + k + "' must be a number");
    p[k] = v.get<double>();
  }
  return p;
}

ParamMap with_truncation(ParamMap p, const Json& root) {
  if (root.contains("truncation")) {
    const auto& t = root["truncation"];
    if (!t.is_object() || !t.contains("sd") || !t["sd"].is_number())
      throw InputError("\"truncation\" must be an object with a numeric \"sd\"");
    p["truncation_sd"] = t["sd"].get<double>();
  }
  return p;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<TableRow> parse_table_csv(const std::string& text) {
  const auto csv = read_csv(text, {"y", "x", "w", "count"});
  std::vector<TableRow> rows;
  for (const auto& [line, f] : csv.rows) {
    TableRow r;
    r.y = f[csv.columns.at("y")];
    r.x = f[csv.columns.at("x")];
    r.w = f[csv.columns.at("w")];
    try {
      r.count = parse_rational(f[csv.columns.at("count")]);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line) + ": count: " + e.what());
    }
    if (r.count < 0) throw InputError("line " + std::to_string(line) + ": negative count " + r.count.get_str());
    if (r.y.empty() || r.x.empty() || r.w.empty()) throw InputError("line " + std::to_string(line) + ": empty level label");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<Sample3> parse_sample_csv(const std::string& text) {
  const auto csv = read_csv(text, {"y", "x", "w"});
  std::vector<Sample3> rows;
  rows.reserve(csv.rows.size());
  for (const auto& [line, f] : csv.rows) {
    rows.push_back({parse_double(f[csv.columns.at("y")], line, "y"), parse_double(f[csv.columns.at("x")], line, "x"),
                    parse_double(f[csv.columns.at("w")], line, "w")});
  }
  return rows;
}

Cov3 parse_covariance_json(const std::string& text) {
  Json j = parse_json(text, "covariance");
  if (j.is_object()) {
    if (!j.contains("covariance")) throw InputError("covariance JSON needs a \"covariance\" key");
    j = j["covariance"];
  }
  if (!j.is_array() || j.size() != 3) throw InputError("covariance must be a 3x3 array");
  Cov3 c{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto row = numbers(j[i], "covariance row");
    if (row.size() != 3) throw InputError("covariance must be a 3x3 array");
    for (std::size_t k = 0; k < 3; ++k) c[i][k] = row[k];
  }
  return c;
}

std::vector<double> parse_axis(const Json& j, const char* name) {
  if (j.is_array()) return numbers(j, name);
  if (j.is_object() && j.contains("lo") && j.contains("hi") && j.contains("n")) {
    const auto n = j["n"].get<long long>();
    if (n < 1) throw InputError(std::string("axis ") + name + ": n must be positive");
    return linspace(j["lo"].get<double>(), j["hi"].get<double>(), static_cast<std::size_t>(n));
  }
  throw InputError(std::string("axis ") + name + " must be a list or {\"lo\", \"hi\", \"n\"}");
}

EvalGrid parse_grid(const Json& j) {
  if (!j.is_object() || !j.contains("y") || !j.contains("x") || !j.contains("w"))
    throw InputError("evaluation grid needs \"y\", \"x\" and \"w\" axes");
  EvalGrid g{parse_axis(j["y"], "y"), parse_axis(j["x"], "x"), parse_axis(j["w"], "w")};
  g.validate();
  return g;
}

ModelConfig parse_model_config(const std::string& text) {
  const Json root = parse_json(text, "model config");
  if (!root.is_object() || !root.contains("family") || !root["family"].is_string())
    throw InputError("model config needs a string \"family\"");
  const auto family = root["family"].get<std::string>();
  ModelConfig cfg;
  if (family == "grid") {
    if (!root.contains("grid") || !root["grid"].is_object()) throw InputError("family 'grid' needs a \"grid\" object");
    const Json& g = root["grid"];
    for (const char* k : {"xs", "ws", "ys"})
      if (!g.contains(k)) throw InputError(std::string("grid needs \"") + k + "\"");
    auto xs = numbers(g["xs"], "xs"), ws = numbers(g["ws"], "ws"), ys = numbers(g["ys"], "ys");
    if (g.contains("from")) {
      const Json& from = g["from"];
      if (!from.is_object() || !from.contains("family")) throw InputError("grid \"from\" needs a \"family\"");
      auto base = make_model(from["family"].get<std::string>(),
                             param_map(from.contains("params") ? from["params"] : Json()));
      cfg.model = std::make_shared<GridModel>(GridModel::tabulate(*base, std::move(xs), std::move(ws), std::move(ys)));
    } else {
      if (!g.contains("cdf_y") || !g.contains("cdf_w")) throw InputError("grid needs \"cdf_y\" and \"cdf_w\"");
      GridModel::Data d{std::move(xs), std::move(ws), std::move(ys), flatten(g["cdf_y"], "cdf_y"),
                        flatten(g["cdf_w"], "cdf_w")};
      cfg.model = std::make_shared<GridModel>(std::move(d));
    }
  } else {
    cfg.model = make_model(family, with_truncation(param_map(root.contains("params") ? root["params"] : Json()), root));
  }
  if (root.contains("evaluation")) cfg.evaluation = parse_grid(root["evaluation"]);
  return cfg;
}

EvalGrid resolve_grid(const std::string& spec, const ContinuousModel& model, const NumericOptions& opts) {
  if (spec == "auto") return auto_grid(model, 25, 25, 7, opts);
  std::size_t ny = 0, nx = 0, nw = 0;
  char a = 0, b = 0;
  std::istringstream s(spec);
  if (s >> ny >> a >> nx >> b >> nw && a == 'x' && b == 'x' && s.peek() == EOF)
    return auto_grid(model, ny, nx, nw, opts);
  if (std::filesystem::exists(spec)) return parse_grid(parse_json(read_file(spec), "grid"));
  throw InputError("grid spec '" + spec + "' is neither 'auto', 'NYxNXxNW' nor a readable JSON file");
}

RunConfig parse_run_config(const std::string& text) {
  const Json j = parse_json(text, "run config");
  if (!j.is_object()) throw InputError("run config must be a JSON object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "checks") {
      for (const auto& e : v) c.checks.push_back(e.get<std::string>());
    } else if (key == "tolerances") {
      for (const auto& [k, t] : v.items()) c.tolerances[k] = t.get<double>();
    } else if (key == "grid") {
      if (v.is_string())
        c.grid = v.get<std::string>();
      else
        c.grid_inline = v;
    } else if (key == "order") {
      c.order = v.get<std::string>();
    } else if (key == "levels") {
      for (const auto& [axis, list] : v.items()) {
        std::vector<std::string> levels;
        for (const auto& e : list) levels.push_back(e.is_string() ? e.get<std::string>() : e.dump());
        if (axis == "y")
          c.levels.y = levels;
        else if (axis == "x")
          c.levels.x = levels;
        else if (axis == "w")
          c.levels.w = levels;
        else
          throw InputError("levels: unknown axis '" + axis + "'");
      }
    } else if (key == "emit_fields") {
      c.emit_fields = v.get<bool>();
    } else if (key == "output") {
      if (v.contains("path")) c.out = v["path"].get<std::string>();
      if (v.contains("format")) c.format = v["format"].get<std::string>();
    } else if (key == "seed") {
      c.seed = v.get<std::uint64_t>();
    } else if (key == "count") {
      c.count = v.get<std::size_t>();
    } else if (key == "suite") {
      c.suite = v.get<std::string>();
    } else {
      throw InputError("run config: unknown key '" + key + "'");
    }
  }
  return c;
}

}  // namespace collapse::cli
