#include "classalg/document.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "classalg/error.hpp"
#include "classalg/json_codec.hpp"

namespace classalg {

Json rational_to_json(const Rational& r) { return format_rational(r); }

Json value_to_json(const Value& v) {
  if (v.is_string()) return v.string();
  const Rational& r = v.number();
  if (boost::multiprecision::denominator(r) == 1) {
    Integer n = boost::multiprecision::numerator(r);
    if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
      return n.convert_to<long long>();
  }
  return Json{{"rational", format_rational(r)}};
}

Value value_from_json(const Json& j) {
  auto bad = [&](const std::string& why) -> Value {
    throw Error(ErrorCode::ParseError, "invalid value " + j.dump() + ": " + why);
  };
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Value(Rational(Integer(j.get<unsigned long long>())));
    return Value(j.get<long long>());
  }
  if (j.is_number_float()) {
    double d = j.get<double>();
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    auto r = parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    if (!r) return bad("not a finite number");
    return *r;
  }
  if (j.is_object() && j.size() == 1 && j.contains("rational") && j["rational"].is_string()) {
    auto r = parse_rational(j["rational"].get<std::string>());
    if (!r) return bad("malformed rational");
    return *r;
  }
  return bad("expected a number, string or {\"rational\": ...}");
}

Json attributes_to_json(const Attributes& a) {
  Json out = Json::object();
  for (const auto& [name, values] : a) {
    Json list = Json::array();
    for (const auto& v : values) list.push_back(value_to_json(v));
    out[name] = list;
  }
  return out;
}

Attributes attributes_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "attributes must be an object");
  Attributes out;
  for (const auto& [name, values] : j.items()) {
    std::vector<Value> list;
    if (values.is_array()) {
      for (const auto& v : values) list.push_back(value_from_json(v));
    } else {
      list.push_back(value_from_json(values));
    }
    out[name] = std::move(list);
  }
  return out;
}

namespace {

Json relation_to_json(const RelationDef& def) {
  Json out{{"name", def.name}};
  if (const auto* e = std::get_if<ExplicitRelation>(&def.body)) {
    out["kind"] = "explicit";
    Json edges = Json::array();
    for (const auto& [a, b] : e->edges) edges.push_back(Json::array({a, b}));
    out["edges"] = edges;
  } else if (const auto* c = std::get_if<ClassRelation>(&def.body)) {
    out["kind"] = "class";
    out["domain"] = print(*c->domain);
    out["range"] = print(*c->range);
  } else {
    const auto& p = std::get<CompositeRelation>(def.body);
    out["kind"] = "composite";
    Json steps = Json::array();
    for (const auto& s : p.path) steps.push_back(print(s));
    out["path"] = steps;
  }
  return out;
}

Step parse_step(const std::string& text) {
  const std::string prefix = "inv(";
  if (text.size() > prefix.size() + 1 && text.compare(0, prefix.size(), prefix) == 0 && text.back() == ')')
    return {text.substr(prefix.size(), text.size() - prefix.size() - 1), true};
  return {text, false};
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "' has the wrong type");
  }
}

Sdnf parse_home(const std::string& text) {
  std::string expr = text == "true" ? "any" : text == "false" ? "empty" : "any where " + text;
  Sdnf s;
  try {
    s = sdnf(*parse_class_expr(expr));
  } catch (const Error& e) {
    throw Error(ErrorCode::IntegrityError, "virtual home '" + text + "': " + e.what());
  }
  if (s.text() != text)
    throw Error(ErrorCode::IntegrityError, "virtual home '" + text + "' is not in normal form");
  return s;
}

RelationDef relation_from_json(const Json& j) {
  auto name = field<std::string>(j, "name");
  auto kind = field<std::string>(j, "kind");
  if (kind == "explicit") {
    RelationDef def{name, ExplicitRelation{}};
    auto& e = std::get<ExplicitRelation>(def.body);
    for (const auto& pair : field<Json>(j, "edges")) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() || !pair[1].is_number_unsigned())
        throw Error(ErrorCode::ParseError, "edge of '" + name + "' must be a pair of oids");
      OidId a = pair[0].get<OidId>(), b = pair[1].get<OidId>();
      e.edges.emplace(a, b);
      e.forward[a].insert(b);
      e.backward[b].insert(a);
    }
    return def;
  }
  if (kind == "class")
    return make_class_relation(name, parse_class_expr(field<std::string>(j, "domain")),
                               parse_class_expr(field<std::string>(j, "range")));
  if (kind == "composite") {
    Path p;
    for (const auto& s : field<std::vector<std::string>>(j, "path")) p.push_back(parse_step(s));
    return make_composite_relation(name, p);
  }
  throw Error(ErrorCode::ParseError, "unknown relation kind '" + kind + "'");
}

}  // namespace

std::string save_document(const StoreState& s) {
  Json doc;
  doc["formatVersion"] = kFormatVersion;
  doc["nextOid"] = s.next_id;

  Json objects = Json::array();
  for (const auto& [id, attrs] : s.objects)
    objects.push_back({{"oid", id}, {"attributes", attributes_to_json(attrs)}});
  doc["objects"] = objects;

  Json relations = Json::array();
  for (const auto& [name, def] : s.relations) relations.push_back(relation_to_json(def));
  doc["relations"] = relations;

  Json classes = Json::array();
  for (const auto& [name, def] : s.classes) classes.push_back({{"name", name}, {"expression", def.text}});
  doc["classes"] = classes;

  doc["constraints"] = s.constraints;

  Json allocations = Json::array();
  for (const auto& [id, home] : s.ledger.allocations) allocations.push_back({{"oid", id}, {"home", home.text()}});
  Json movements = Json::array();
  for (const auto& m : s.ledger.movements) movements.push_back({{"oid", m.oid}, {"from", m.from}, {"to", m.to}});
  Json per_node = Json::object();
  for (const auto& [node, n] : s.ledger.per_node()) per_node[node] = n;
  doc["virtualLedger"] = {{"allocations", allocations}, {"movements", movements}, {"perNode", per_node}};

  return doc.dump(2) + "\n";
}

Store load_document(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "document must be a JSON object");
  int version = field<int>(doc, "formatVersion");
  if (version != kFormatVersion)
    throw Error(ErrorCode::VersionMismatch, "unsupported formatVersion " + std::to_string(version));

  StoreState s;
  s.next_id = doc.contains("nextOid") ? field<OidId>(doc, "nextOid") : 1;
  OidId max_id = 0;
  if (doc.contains("objects")) {
    for (const auto& o : field<Json>(doc, "objects")) {
      auto id = field<OidId>(o, "oid");
      if (!s.objects.emplace(id, attributes_from_json(o.value("attributes", Json::object()))).second)
        throw Error(ErrorCode::IntegrityError, "duplicate oid " + std::to_string(id));
      max_id = std::max(max_id, id);
    }
  }
  if (doc.contains("relations")) {
    for (const auto& r : field<Json>(doc, "relations")) {
      RelationDef def = relation_from_json(r);
      std::string name = def.name;
      if (!s.relations.emplace(name, std::move(def)).second)
        throw Error(ErrorCode::IntegrityError, "duplicate relation '" + name + "'");
    }
  }
  if (doc.contains("virtualLedger")) {
    const Json& l = doc["virtualLedger"];
    if (l.contains("allocations"))
      for (const auto& a : field<Json>(l, "allocations")) {
        auto id = field<OidId>(a, "oid");
        if (!s.ledger.allocations.emplace(id, parse_home(field<std::string>(a, "home"))).second)
          throw Error(ErrorCode::IntegrityError, "duplicate virtual oid " + std::to_string(id));
        max_id = std::max(max_id, id);
      }
    if (l.contains("movements"))
      for (const auto& m : field<Json>(l, "movements"))
        s.ledger.movements.push_back(
            {field<OidId>(m, "oid"), field<std::string>(m, "from"), field<std::string>(m, "to")});
  }
  if (!doc.contains("nextOid")) s.next_id = max_id + 1;
  if (doc.contains("constraints")) s.constraints = field<std::vector<std::string>>(doc, "constraints");

  Store store(std::move(s));

  // Classes may refer to each other; define them as their references become
  // available.
  std::vector<std::pair<std::string, std::string>> pending;
  if (doc.contains("classes"))
    for (const auto& c : field<Json>(doc, "classes"))
      pending.emplace_back(field<std::string>(c, "name"), field<std::string>(c, "expression"));
  while (!pending.empty()) {
    std::vector<std::pair<std::string, std::string>> later;
    std::optional<Error> last;
    for (auto& [name, expr] : pending) {
      try {
        store.define_class(name, expr);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnknownClassName) throw;
        later.emplace_back(name, expr);
        last = e;
      }
    }
    if (later.size() == pending.size()) throw *last;
    pending = std::move(later);
  }

  StoreState final = store.state();
  final.revision = 0;
  return Store(std::move(final));
}

Store load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_document(buf.str());
}

void save_file(const StoreState& s, const std::string& path) {
  std::string text = save_document(s);
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error(ErrorCode::ParseError, "cannot replace '" + path + "'");
}

}  // namespace classalg
