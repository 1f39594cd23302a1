#include "classalg/service.hpp"

#include <algorithm>
#include <sstream>

#include "classalg/document.hpp"
#include "classalg/evaluate.hpp"
#include "classalg/hierarchy.hpp"
#include "classalg/probability.hpp"

namespace classalg {

Json error_json(const Error& e) {
  Json out{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (e.position()) out["position"] = *e.position();
  return out;
}

namespace {

struct HttpError {
  int status;
  Json body;
};

[[noreturn]] void fail(int status, ErrorCode code, const std::string& message) {
  throw HttpError{status, error_json(Error(code, message))};
}

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/'))
    if (!part.empty()) out.push_back(part);
  return out;
}

Json parse_body(const Request& r) {
  if (r.body.empty()) return Json::object();
  try {
    return Json::parse(r.body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON body: ") + e.what(), e.byte);
  }
}

template <class T>
T get(const Json& body, const char* key) {
  if (!body.is_object() || !body.contains(key))
    throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  try {
    return body.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "' has the wrong type");
  }
}

OidId parse_oid(const std::string& s) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used == s.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::UnknownOid, "invalid oid '" + s + "'");
}

std::size_t query_size(const Request& r, const char* key, std::size_t fallback) {
  auto it = r.query.find(key);
  if (it == r.query.end()) return fallback;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError, std::string("query parameter '") + key + "' must be a count");
}

struct Page {
  std::size_t cursor = 0, limit = Service::kDefaultPageSize;
};

Page page_of(const Request& r) {
  Page p{query_size(r, "cursor", 0), query_size(r, "limit", Service::kDefaultPageSize)};
  if (p.limit == 0) p.limit = Service::kDefaultPageSize;
  return p;
}

Json slice(const std::vector<OidId>& v, const Page& p) {
  Json out = Json::array();
  for (std::size_t i = p.cursor; i < v.size() && i < p.cursor + p.limit; ++i) out.push_back(v[i]);
  return out;
}

Json extent_json(const ExtentResult& e, const Page& p) {
  Json out{{"trueSet", slice(e.true_set, p)},
           {"falseSet", slice(e.false_set, p)},
           {"unknownSet", slice(e.unknown_set, p)},
           {"counts",
            {{"true", e.true_set.size()}, {"false", e.false_set.size()}, {"unknown", e.unknown_set.size()}}}};
  std::size_t longest = std::max({e.true_set.size(), e.false_set.size(), e.unknown_set.size()});
  out["nextCursor"] = longest > p.cursor + p.limit ? Json(p.cursor + p.limit) : Json(nullptr);
  return out;
}

Json pairs_json(const std::vector<NamePair>& v) {
  Json out = Json::array();
  for (const auto& [a, b] : v) out.push_back(Json::array({a, b}));
  return out;
}

Json object_json(const StoreState& s, OidId id) {
  if (auto it = s.objects.find(id); it != s.objects.end())
    return {{"oid", id}, {"kind", "real"}, {"attributes", attributes_to_json(it->second)}};
  if (auto it = s.ledger.allocations.find(id); it != s.ledger.allocations.end())
    return {{"oid", id}, {"kind", "virtual"}, {"home", it->second.text()}};
  throw Error(ErrorCode::UnknownOid, "unknown oid " + std::to_string(id));
}

Json relation_json(const RelationDef& def) {
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
    out["kind"] = "composite";
    out["path"] = print(std::get<CompositeRelation>(def.body).path);
  }
  return out;
}

Json class_json(const ClassDef& c) {
  return {{"name", c.name}, {"expression", c.text}, {"sdnf", c.intent.text()}};
}

Json interval_json(const std::pair<Rational, Rational>& i) {
  return Json::array({rational_to_json(i.first), rational_to_json(i.second)});
}

Json ledger_json(const VirtualLedger& l) {
  Json per = Json::object();
  for (const auto& [node, n] : l.per_node()) per[node] = n;
  return {{"total", l.total()}, {"perNode", per}};
}

Json movements_json(const std::vector<Movement>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back({{"oid", m.oid}, {"from", m.from}, {"to", m.to}});
  return out;
}

std::vector<ProbConstraint> constraints_of(const Json& body) {
  std::vector<ProbConstraint> out;
  if (body.contains("constraint")) out.push_back(ProbConstraint::parse(get<std::string>(body, "constraint")));
  if (body.contains("constraints"))
    for (const auto& t : get<std::vector<std::string>>(body, "constraints")) out.push_back(ProbConstraint::parse(t));
  return out;
}

Json validation_json(const ValidationResult& v, const std::vector<ProbConstraint>& cs) {
  Json list = Json::array();
  for (const auto& x : v.violations) {
    Json texts = Json::array();
    for (std::size_t i : x.constraints) texts.push_back(cs.at(i).text());
    list.push_back({{"type", x.type}, {"constraints", texts}, {"message", x.message}});
  }
  return {{"ok", v.ok()}, {"violations", list}};
}

Json apply_json(const ApplyReport& r, const StoreState& after) {
  Json edges = Json::array();
  for (const auto& e : r.edges)
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"direction", e.up ? "up" : "down"},
                     {"op", std::string(to_string(e.op))},
                     {"bound", rational_to_json(e.bound)},
                     {"modified", e.modified}});
  Json steps = Json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"constraint", r.status.at(s.constraint).text},
                     {"node", s.node},
                     {"nB", s.n_b.str()},
                     {"nAB", s.n_ab.str()},
                     {"moved", s.moved.str()},
                     {"fresh", s.fresh.str()}});
  Json cascades = Json::array();
  for (const auto& c : r.cascades)
    cascades.push_back({{"constraint", r.status.at(c.constraint).text},
                        {"from", c.from},
                        {"to", c.to},
                        {"m", c.m.str()},
                        {"t", c.t.str()}});
  Json status = Json::array();
  for (const auto& s : r.status)
    status.push_back({{"constraint", s.text},
                      {"nB", s.n_b.str()},
                      {"nAB", s.n_ab.str()},
                      {"ratio", s.n_b == 0 ? Json(nullptr) : rational_to_json(Rational(s.n_ab, s.n_b))},
                      {"satisfied", s.satisfied}});
  Json delta = Json::object();
  for (const auto& [node, n] : r.per_node_delta) delta[node] = n;
  return {{"allocated", r.allocated},
          {"moved", r.moved},
          {"perNodeDelta", delta},
          {"movements", movements_json(r.movements)},
          {"edges", edges},
          {"steps", steps},
          {"cascades", cascades},
          {"status", status},
          {"ledger", ledger_json(after.ledger)}};
}

Json hierarchy_json(const Hierarchy& h) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < h.nodes.size(); ++i) {
    const auto& n = h.nodes[i];
    nodes.push_back({{"id", i},
                     {"members", n.members},
                     {"intent", n.intent.text()},
                     {"counts", {{"true", n.n_true}, {"false", n.n_false}, {"unknown", n.n_unknown}}}});
  }
  Json edges = Json::array();
  for (const auto& e : h.edges) edges.push_back({{"child", e.child}, {"parent", e.parent}, {"logical", e.logical}});
  return {{"nodes", nodes}, {"edges", edges}};
}

Json aggregates_json(const AttributeAggregates& a) {
  Json out = Json::object();
  for (const auto& [fn, v] : a.values) out[std::string(to_string(fn))] = v ? Json(v->text()) : Json(nullptr);
  return out;
}

Json summary_json(const std::vector<SummaryRow>& rows, const std::string& attr) {
  Json list = Json::array();
  for (const auto& r : rows) {
    Json others = Json::object();
    for (const auto& [name, agg] : r.others) others[name] = aggregates_json(agg);
    list.push_back({{"value", value_to_json(r.value)}, {"count", r.count}, {"aggregates", others}});
  }
  return {{"attribute", attr}, {"groups", list}};
}

Json suggestions_json(const std::vector<RuleSuggestion>& v) {
  Json out = Json::array();
  for (const auto& s : v)
    out.push_back({{"context", s.context},
                   {"contextIntent", s.context_intent.text()},
                   {"antecedent", s.antecedent->text},
                   {"consequent", s.consequent->text},
                   {"support", s.support}});
  return out;
}

Json description_json(const Description& d) {
  Json m = Json::object();
  for (const auto& [name, f] : d.membership) m[name] = rational_to_json(f);
  return {{"description", d.conjunct.literals.empty() ? "true" : d.conjunct.text()}, {"membership", m}};
}

Structural structural_kind(const std::string& k) {
  if (k == "indep") return Structural::indep;
  if (k == "nonoverlap") return Structural::nonoverlap;
  if (k == "subset") return Structural::subset;
  throw Error(ErrorCode::InvalidConstraint, "unknown structural kind '" + k + "'");
}

RelationDef relation_from_body(const Json& body) {
  auto name = get<std::string>(body, "name");
  auto kind = body.value("kind", std::string("explicit"));
  if (kind == "explicit") return RelationDef{name, ExplicitRelation{}};
  if (kind == "class")
    return make_class_relation(name, parse_class_expr(get<std::string>(body, "domain")),
                               parse_class_expr(get<std::string>(body, "range")));
  if (kind == "composite") {
    // "r1.inv(r2)" is read as the dot chain of a class expression.
    ClassPtr e = parse_class_expr("any." + get<std::string>(body, "path"));
    Path p;
    while (const auto* d = std::get_if<DotExpr>(&e->node)) {
      p.insert(p.begin(), d->step);
      e = d->base;
    }
    return make_composite_relation(name, p);
  }
  throw Error(ErrorCode::ParseError, "unknown relation kind '" + kind + "'");
}

std::vector<std::pair<OidId, OidId>> edges_of(const Json& body) {
  std::vector<std::pair<OidId, OidId>> out;
  for (const auto& e : get<Json>(body, "edges")) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
      throw Error(ErrorCode::ParseError, "an edge is a pair of oids");
    out.emplace_back(e[0].get<OidId>(), e[1].get<OidId>());
  }
  return out;
}

bool is_write(const Request& r, const std::vector<std::string>& seg) {
  if (seg.empty()) return false;
  const std::string& m = r.method;
  if (m == "PATCH" || m == "DELETE" || m == "PUT") return true;
  if (m != "POST") return false;
  const std::string& head = seg[0];
  if (head == "objects" || head == "relations" || head == "classes") return true;
  return head == "constraints" && seg.size() == 2 && seg[1] == "apply";
}

}  // namespace

Service::Service(Store store, std::optional<std::string> persist_path)
    : store_(std::move(store)), persist_path_(std::move(persist_path)) {}

Snapshot Service::snapshot() const {
  std::shared_lock lock(mutex_);
  return store_.snapshot();
}

std::uint64_t Service::revision() const {
  std::shared_lock lock(mutex_);
  return store_.revision();
}

Response Service::handle(const Request& r) {
  try {
    std::vector<std::string> seg = segments(r.path);
    if (!is_write(r, seg)) return read(r, snapshot());

    std::unique_lock lock(mutex_);
    if (r.if_match) {
      std::string want = *r.if_match;
      want.erase(std::remove(want.begin(), want.end(), '"'), want.end());
      if (want != "*" && want != std::to_string(store_.revision()))
        fail(409, ErrorCode::Conflict,
             "revision " + want + " is stale; current revision is " + std::to_string(store_.revision()));
    }
    Store work = store_;
    Response res = write(r, work);
    if (work.revision() != store_.revision() || work.snapshot() != store_.snapshot()) {
      if (persist_path_) save_file(work.state(), *persist_path_);
      store_ = std::move(work);
    }
    if (res.body.is_object()) res.body["revision"] = store_.revision();
    return res;
  } catch (const HttpError& e) {
    return {e.status, e.body};
  } catch (const Error& e) {
    return {400, error_json(e)};
  }
}

Response Service::read(const Request& r, const Snapshot& snap) {
  std::vector<std::string> seg = segments(r.path);
  const StoreState& s = *snap;
  const std::string& m = r.method;
  auto with_rev = [&](Json body) {
    if (body.is_object()) body["revision"] = s.revision;
    return Response{200, std::move(body)};
  };
  auto not_found = [&]() -> Response { fail(404, ErrorCode::NotFound, "no route for " + m + " " + r.path); };
  if (seg.empty()) return not_found();
  const std::string& head = seg[0];

  if (m == "GET" && seg.size() == 1 && head == "health") return with_rev({{"status", "ok"}});
  if (m == "GET" && seg.size() == 1 && head == "revision") return with_rev(Json::object());
  if (m == "GET" && seg.size() == 1 && head == "document") return {200, Json::parse(save_document(s))};

  if (head == "objects" && m == "GET") {
    if (seg.size() == 1) {
      Page p = page_of(r);
      std::vector<Oid> all = s.all_oids();
      Json list = Json::array();
      for (std::size_t i = p.cursor; i < all.size() && i < p.cursor + p.limit; ++i)
        list.push_back(object_json(s, all[i].id));
      bool more = all.size() > p.cursor + p.limit;
      return with_rev({{"objects", list}, {"total", all.size()}, {"nextCursor", more ? Json(p.cursor + p.limit) : Json(nullptr)}});
    }
    if (seg.size() == 2) return with_rev(object_json(s, parse_oid(seg[1])));
  }

  if (head == "relations" && m == "GET" && seg.size() == 1) {
    Json list = Json::array();
    for (const auto& [name, def] : s.relations) list.push_back(relation_json(def));
    return with_rev({{"relations", list}});
  }

  if (head == "classes" && m == "GET") {
    if (seg.size() == 1) {
      Json list = Json::array();
      for (const auto& [name, def] : s.classes) list.push_back(class_json(def));
      return with_rev({{"classes", list}});
    }
    const ClassDef* c = s.find_class(seg[1]);
    if (!c) throw Error(ErrorCode::UnknownClassName, "unknown class '" + seg[1] + "'");
    if (seg.size() == 2) return with_rev(class_json(*c));
    if (seg.size() == 3 && seg[2] == "extent") {
      Evaluator ev(snap);
      Json out = extent_json(ev.extent(*make_class(c->name)), page_of(r));
      out["name"] = c->name;
      out["sdnf"] = c->intent.text();
      return with_rev(out);
    }
  }

  if (m == "POST" && seg.size() == 1 && head == "normalize") {
    Json body = parse_body(r);
    Sdnf d = sdnf(*parse_class_expr(get<std::string>(body, "expression")), s.context());
    return with_rev({{"sdnf", d.text()}});
  }

  if (m == "POST" && seg.size() == 1 && head == "query") {
    Json body = parse_body(r);
    auto text = get<std::string>(body, "expression");
    ClassPtr e = parse_class_expr(text);
    Sdnf d = sdnf(*e, s.context());
    Evaluator ev(snap);
    ExtentResult ext = ev.extent(*e);
    std::size_t n = ev.universe().size();
    if (n == 0) throw Error(ErrorCode::EmptyUniverse, "the object universe is empty");
    Rational pr(static_cast<long long>(ext.true_set.size()), static_cast<long long>(n));
    std::pair<Rational, Rational> bi{pr, Rational(1) - Rational(static_cast<long long>(ext.false_set.size()),
                                                               static_cast<long long>(n))};
    Json out = extent_json(ext, page_of(r));
    out["expression"] = print(*e);
    out["sdnf"] = d.text();
    out["probability"] = rational_to_json(pr);
    out["probabilityValue"] = to_double(pr);
    out["beliefInterval"] = interval_json(bi);
    out["beliefIntervalValue"] = Json::array({to_double(bi.first), to_double(bi.second)});
    return with_rev(out);
  }

  if (m == "GET" && seg.size() == 2 && head == "report" && seg[1] == "implications") {
    ImplicationReport rep = implication_report(snap);
    return with_rev({{"logicalEquivalences", pairs_json(rep.logical_equivalences)},
                     {"databaseEquivalences", pairs_json(rep.database_equivalences)},
                     {"logicalImplications", pairs_json(rep.logical_implications)},
                     {"databaseImplications", pairs_json(rep.database_implications)}});
  }

  if (m == "POST" && seg.size() == 1 && head == "describe") {
    Json body = parse_body(r);
    return with_rev(description_json(describe(snap, get<std::vector<OidId>>(body, "oids"))));
  }

  if (m == "GET" && seg.size() == 1 && head == "hierarchy") return with_rev(hierarchy_json(build_hierarchy(snap)));

  if (m == "GET" && seg.size() == 1 && head == "summarize") {
    auto it = r.query.find("attr");
    if (it == r.query.end()) throw Error(ErrorCode::ParseError, "missing query parameter 'attr'");
    return with_rev(summary_json(summarize(snap, it->second), it->second));
  }

  if (m == "GET" && seg.size() == 1 && head == "suggest-rules")
    return with_rev({{"suggestions", suggestions_json(suggest_rules(snap))}});

  if (head == "constraints") {
    if (m == "GET" && seg.size() == 1)
      return with_rev({{"constraints", s.constraints}, {"ledger", ledger_json(s.ledger)}});
    if (m == "POST" && seg.size() == 1) {
      std::vector<ProbConstraint> cs;
      for (const auto& t : s.constraints) cs.push_back(ProbConstraint::parse(t));
      for (auto& c : constraints_of(parse_body(r))) cs.push_back(std::move(c));
      return with_rev(validation_json(validate_constraints(cs, snap), cs));
    }
  }

  if (m == "POST" && seg.size() == 1 && head == "structural") {
    Json body = parse_body(r);
    StructuralCheck c = translate_structural(structural_kind(get<std::string>(body, "kind")),
                                             *parse_class_expr(get<std::string>(body, "a")),
                                             *parse_class_expr(get<std::string>(body, "b")), snap);
    return with_rev({{"satisfied", c.satisfied}, {"equation", c.equation}, {"n", c.n},
                     {"nA", c.n_a}, {"nB", c.n_b}, {"nAB", c.n_ab}});
  }

  return not_found();
}

Response Service::write(const Request& r, Store& work) {
  std::vector<std::string> seg = segments(r.path);
  const std::string& m = r.method;
  const std::string& head = seg[0];
  Json body = parse_body(r);

  if (head == "objects") {
    if (m == "POST" && seg.size() == 1) {
      OidId id = work.create_object(attributes_from_json(body.value("attributes", Json::object())));
      return {201, object_json(work.state(), id)};
    }
    if (seg.size() == 2) {
      OidId id = parse_oid(seg[1]);
      if (m == "DELETE") {
        work.delete_object(id);
        return {200, {{"deleted", id}}};
      }
      if (m == "PATCH") {
        if (!work.state().is_real(id)) throw Error(ErrorCode::UnknownOid, "unknown oid " + std::to_string(id));
        if (body.contains("set"))
          for (auto& [attr, values] : attributes_from_json(body["set"])) work.set_attribute(id, attr, values);
        if (body.contains("remove"))
          for (const auto& attr : get<std::vector<std::string>>(body, "remove")) work.remove_attribute(id, attr);
        return {200, object_json(work.state(), id)};
      }
    }
  }

  if (head == "relations") {
    if (m == "POST" && seg.size() == 1) {
      RelationDef def = relation_from_body(body);
      std::string name = def.name;
      bool is_explicit = def.is_explicit();
      work.define_relation(std::move(def));
      if (is_explicit && body.contains("edges"))
        for (const auto& [a, b] : edges_of(body)) work.add_edge(name, a, b);
      return {201, relation_json(work.state().relations.at(name))};
    }
    if (seg.size() == 3 && seg[2] == "edges" && (m == "POST" || m == "DELETE")) {
      for (const auto& [a, b] : edges_of(body)) {
        if (m == "POST")
          work.add_edge(seg[1], a, b);
        else
          work.remove_edge(seg[1], a, b);
      }
      return {200, relation_json(work.state().relations.at(seg[1]))};
    }
  }

  if (head == "classes") {
    if (m == "POST" && seg.size() == 1) {
      const ClassDef& c = work.define_class(get<std::string>(body, "name"), get<std::string>(body, "expression"));
      Json out = class_json(c);
      Evaluator ev(work.snapshot());
      ExtentResult e = ev.extent(c.intent);
      out["extentCounts"] = {{"true", e.true_set.size()}, {"false", e.false_set.size()}, {"unknown", e.unknown_set.size()}};
      return {201, out};
    }
    if (m == "DELETE" && seg.size() == 2) {
      work.remove_class(seg[1]);
      return {200, {{"deleted", seg[1]}}};
    }
  }

  if (head == "constraints" && m == "POST" && seg.size() == 2) {
    ApplyReport rep = apply_constraints(work, constraints_of(body));
    return {200, apply_json(rep, work.state())};
  }

  fail(404, ErrorCode::NotFound, "no route for " + m + " " + r.path);
}

}  // namespace classalg
