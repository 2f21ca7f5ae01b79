#include "mrfsdp/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "mrfsdp/error.hpp"

namespace mrfsdp {

using json = nlohmann::ordered_json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& keys,
                  const std::string& where) {
  if (!obj.is_object()) throw InvalidInputError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) {
      throw InvalidInputError("unknown key '" + key + "' in " + where);
    }
  }
  for (const auto& key : keys) {
    if (!obj.contains(key)) {
      throw InvalidInputError("missing key '" + key + "' in " + where);
    }
  }
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw InvalidInputError("'" + key + "' in " + where + " must be an integer");
  }
  const auto value = v.get<std::int64_t>();
  if (value < INT32_MIN || value > INT32_MAX) {
    throw InvalidInputError("'" + key + "' in " + where + " is out of range");
  }
  return static_cast<int>(value);
}

double get_number(const json& obj, const std::string& key,
                  const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw InvalidInputError("'" + key + "' in " + where + " must be a number");
  }
  return v.get<double>();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string serialize_instance(const MrfInstance& mrf) {
  json doc;
  doc["num_nodes"] = mrf.num_nodes();
  doc["num_labels"] = mrf.num_labels();
  doc["unary"] = json::array();
  for (const auto& t : mrf.unary_terms()) {
    doc["unary"].push_back(
        {{"node", t.node}, {"label", t.label}, {"weight", t.weight}});
  }
  doc["binary"] = json::array();
  for (const auto& e : mrf.binary_terms()) {
    doc["binary"].push_back({{"i", e.i}, {"j", e.j}, {"weight", e.weight}});
  }
  return doc.dump(1) + "\n";
}

MrfInstance parse_instance(std::string_view text) {
  const json doc = parse_json(text);
  require_keys(doc, {"num_nodes", "num_labels", "unary", "binary"}, "instance");
  if (!doc["unary"].is_array() || !doc["binary"].is_array()) {
    throw InvalidInputError("'unary' and 'binary' must be arrays");
  }
  std::vector<UnaryTerm> unary;
  for (const auto& t : doc["unary"]) {
    require_keys(t, {"node", "label", "weight"}, "unary term");
    unary.push_back({get_int(t, "node", "unary term"),
                     get_int(t, "label", "unary term"),
                     get_number(t, "weight", "unary term")});
  }
  std::vector<BinaryTerm> binary;
  for (const auto& e : doc["binary"]) {
    require_keys(e, {"i", "j", "weight"}, "binary term");
    binary.push_back({get_int(e, "i", "binary term"),
                      get_int(e, "j", "binary term"),
                      get_number(e, "weight", "binary term")});
  }
  return MrfInstance(get_int(doc, "num_nodes", "instance"),
                     get_int(doc, "num_labels", "instance"), std::move(unary),
                     std::move(binary));
}

MrfInstance read_instance(const std::filesystem::path& path) {
  return parse_instance(read_text_file(path));
}

void write_instance(const std::filesystem::path& path, const MrfInstance& mrf) {
  write_file_atomic(path, serialize_instance(mrf));
}

std::string serialize_labeling(const Labeling& x) {
  json doc;
  doc["labeling"] = x;
  return doc.dump() + "\n";
}

Labeling parse_labeling(std::string_view text) {
  const json doc = parse_json(text);
  require_keys(doc, {"labeling"}, "labeling document");
  if (!doc["labeling"].is_array()) {
    throw InvalidInputError("'labeling' must be an array");
  }
  Labeling x;
  for (const auto& v : doc["labeling"]) {
    if (!v.is_number_integer()) {
      throw InvalidInputError("labels must be integers");
    }
    x.push_back(v.get<int>());
  }
  return x;
}

std::string instance_fingerprint(const MrfInstance& mrf) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : serialize_instance(mrf)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw InvalidInputError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InvalidInputError("cannot replace " + path.string() + ": " +
                            ec.message());
  }
}

std::string export_triplets(const SparseMatrix& m, double offset) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "% " << m.rows() << " " << m.cols() << " " << m.nonZeros() << " "
     << offset << "\n";
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
    }
  }
  return os.str();
}

}  // namespace mrfsdp
