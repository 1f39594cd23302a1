#include "classalg/model.hpp"

#include <algorithm>
#include <functional>

#include "classalg/error.hpp"

namespace classalg {

RelationDef make_class_relation(std::string name, ClassPtr domain, ClassPtr range) {
  return RelationDef{std::move(name), ClassRelation{std::move(domain), std::move(range)}};
}

RelationDef make_composite_relation(std::string name, Path path) {
  return RelationDef{std::move(name), CompositeRelation{std::move(path)}};
}

std::map<std::string, std::size_t> VirtualLedger::per_node() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [id, home] : allocations) ++out[home.text()];
  return out;
}

std::vector<Oid> StoreState::all_oids() const {
  std::vector<Oid> out;
  out.reserve(objects.size() + ledger.allocations.size());
  for (const auto& [id, attrs] : objects) out.push_back({id, OidKind::real});
  for (const auto& [id, home] : ledger.allocations) out.push_back({id, OidKind::virtual_});
  std::sort(out.begin(), out.end());
  return out;
}

const ClassDef* StoreState::find_class(const std::string& name) const {
  auto it = classes.find(name);
  return it == classes.end() ? nullptr : &it->second;
}

ClassResolver StoreState::resolver() const {
  return [this](const std::string& name) -> const Sdnf* {
    const ClassDef* c = find_class(name);
    return c ? &c->intent : nullptr;
  };
}

NormalizeContext StoreState::context(std::optional<std::string> defining) const {
  NormalizeContext ctx;
  ctx.resolve = resolver();
  ctx.defining = std::move(defining);
  return ctx;
}

void check_identifier(const std::string& name, const char* what) {
  if (!is_identifier(name))
    throw Error(ErrorCode::InvalidIdentifier, std::string("invalid ") + what + " '" + name + "'");
}

namespace {

void check_values(const std::string& attr, const std::vector<Value>& values) {
  check_identifier(attr, "attribute name");
  if (values.empty())
    throw Error(ErrorCode::EmptyValueList, "attribute '" + attr + "' has an empty value list");
}

// Depth-first search over composite references.
void check_composites(const std::map<std::string, RelationDef>& relations) {
  std::map<std::string, int> state;  // 1 = on stack, 2 = done
  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    auto it = relations.find(name);
    if (it == relations.end())
      throw Error(ErrorCode::UnknownRelationName, "unknown relation '" + name + "'");
    int& st = state[name];
    if (st == 2) return;
    if (st == 1) throw Error(ErrorCode::CyclicComposite, "composite relation '" + name + "' is cyclic");
    st = 1;
    if (const auto* c = std::get_if<CompositeRelation>(&it->second.body))
      for (const auto& s : c->path) visit(s.relation);
    state[name] = 2;
  };
  for (const auto& [name, def] : relations) visit(name);
}

}  // namespace

Store::Store() : state_(std::make_shared<StoreState>()) {}

Store::Store(StoreState state) : state_(std::make_shared<StoreState>(std::move(state))) {
  check_integrity(*state_);
}

StoreState& Store::mutate() {
  if (state_.use_count() > 1) state_ = std::make_shared<StoreState>(*state_);
  ++state_->revision;
  return *state_;
}

OidId Store::create_object(Attributes attributes) {
  for (const auto& [attr, values] : attributes) check_values(attr, values);
  StoreState& s = mutate();
  OidId id = s.next_id++;
  s.objects.emplace(id, std::move(attributes));
  return id;
}

void Store::delete_object(OidId id) {
  if (!state_->is_real(id)) throw Error(ErrorCode::UnknownOid, "unknown oid " + std::to_string(id));
  StoreState& s = mutate();
  s.objects.erase(id);
  for (auto& [name, def] : s.relations) {
    auto* e = std::get_if<ExplicitRelation>(&def.body);
    if (!e) continue;
    for (OidId t : e->forward[id]) {
      e->edges.erase({id, t});
      e->backward[t].erase(id);
      if (e->backward[t].empty()) e->backward.erase(t);
    }
    for (OidId f : e->backward[id]) {
      e->edges.erase({f, id});
      e->forward[f].erase(id);
      if (e->forward[f].empty()) e->forward.erase(f);
    }
    e->forward.erase(id);
    e->backward.erase(id);
  }
}

void Store::set_attribute(OidId id, const std::string& attr, std::vector<Value> values) {
  check_values(attr, values);
  if (!state_->is_real(id)) throw Error(ErrorCode::UnknownOid, "unknown oid " + std::to_string(id));
  mutate().objects[id][attr] = std::move(values);
}

void Store::remove_attribute(OidId id, const std::string& attr) {
  if (!state_->is_real(id)) throw Error(ErrorCode::UnknownOid, "unknown oid " + std::to_string(id));
  mutate().objects[id].erase(attr);
}

void Store::add_edge(const std::string& relation, OidId source, OidId target) {
  check_identifier(relation, "relation name");
  for (OidId id : {source, target})
    if (!state_->is_real(id))
      throw Error(ErrorCode::UnknownOid, "unknown (or virtual) oid " + std::to_string(id));
  auto it = state_->relations.find(relation);
  if (it != state_->relations.end() && !it->second.is_explicit())
    throw Error(ErrorCode::NotExplicit, "relation '" + relation + "' is not an explicit relation");
  StoreState& s = mutate();
  auto& def = s.relations[relation];
  def.name = relation;
  auto& e = std::get<ExplicitRelation>(def.body);
  e.edges.insert({source, target});
  e.forward[source].insert(target);
  e.backward[target].insert(source);
}

void Store::remove_edge(const std::string& relation, OidId source, OidId target) {
  auto it = state_->relations.find(relation);
  if (it == state_->relations.end())
    throw Error(ErrorCode::UnknownRelationName, "unknown relation '" + relation + "'");
  if (!it->second.is_explicit())
    throw Error(ErrorCode::NotExplicit, "relation '" + relation + "' is not an explicit relation");
  auto& e = std::get<ExplicitRelation>(mutate().relations[relation].body);
  if (!e.edges.erase({source, target})) return;
  e.forward[source].erase(target);
  if (e.forward[source].empty()) e.forward.erase(source);
  e.backward[target].erase(source);
  if (e.backward[target].empty()) e.backward.erase(target);
}

void Store::define_relation(RelationDef def) {
  check_identifier(def.name, "relation name");
  if (state_->relations.count(def.name))
    throw Error(ErrorCode::NameClash, "relation '" + def.name + "' is already defined");
  if (const auto* c = std::get_if<CompositeRelation>(&def.body)) {
    if (c->path.empty())
      throw Error(ErrorCode::SyntaxError, "composite relation '" + def.name + "' has an empty path");
    for (const auto& s : c->path)
      if (s.relation == def.name)
        throw Error(ErrorCode::CyclicComposite,
                    "composite relation '" + def.name + "' refers to itself");
    auto trial = state_->relations;
    trial.emplace(def.name, def);
    check_composites(trial);
  }
  if (const auto* c = std::get_if<ClassRelation>(&def.body)) {
    // Resolve now so unknown class names fail at definition time.
    sdnf(*c->domain, state_->context());
    sdnf(*c->range, state_->context());
  }
  StoreState& s = mutate();
  std::string name = def.name;
  s.relations.emplace(name, std::move(def));
}

const ClassDef& Store::define_class(const std::string& name, const std::string& text) {
  check_identifier(name, "class name");
  ClassPtr e = parse_class_expr(text);
  NormalizeContext ctx = state_->context(name);
  ctx.options = normalize_options;
  Sdnf intent = sdnf(*e, ctx);
  for (const auto& [other, def] : state_->classes) {
    if (other != name && def.intent == intent)
      throw Error(ErrorCode::DuplicateIntent,
                  "class '" + name + "' has the same intent as '" + other + "': " + intent.text());
  }
  StoreState& s = mutate();
  s.classes[name] = ClassDef{name, std::move(intent), text};
  return s.classes[name];
}

void Store::remove_class(const std::string& name) {
  if (!state_->classes.count(name))
    throw Error(ErrorCode::UnknownClassName, "unknown class '" + name + "'");
  mutate().classes.erase(name);
}

OidId Store::add_virtual(const Sdnf& home) {
  if (home.is_false()) throw Error(ErrorCode::Unsatisfiable, "cannot home a virtual object at false");
  StoreState& s = mutate();
  OidId id = s.next_id++;
  s.ledger.allocations.emplace(id, home);
  s.ledger.movements.push_back({id, "", home.text()});
  return id;
}

void Store::move_virtual(OidId id, const Sdnf& to) {
  auto it = state_->ledger.allocations.find(id);
  if (it == state_->ledger.allocations.end())
    throw Error(ErrorCode::UnknownOid, "unknown virtual oid " + std::to_string(id));
  std::string from = it->second.text();
  StoreState& s = mutate();
  s.ledger.allocations[id] = to;
  s.ledger.movements.push_back({id, from, to.text()});
}

void Store::set_constraints(std::vector<std::string> texts) { mutate().constraints = std::move(texts); }

void check_integrity(const StoreState& s) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::IntegrityError, msg); };
  for (const auto& [id, attrs] : s.objects) {
    if (id == 0 || id >= s.next_id) fail("oid " + std::to_string(id) + " is outside the allocated range");
    if (s.ledger.allocations.count(id)) fail("oid " + std::to_string(id) + " is both real and virtual");
    for (const auto& [attr, values] : attrs) {
      if (!is_identifier(attr)) fail("invalid attribute name '" + attr + "' on oid " + std::to_string(id));
      if (values.empty()) fail("empty value list for '" + attr + "' on oid " + std::to_string(id));
    }
  }
  for (const auto& [id, home] : s.ledger.allocations)
    if (id == 0 || id >= s.next_id) fail("virtual oid " + std::to_string(id) + " is outside the allocated range");
  for (const auto& [name, def] : s.relations) {
    if (name != def.name) fail("relation key mismatch for '" + name + "'");
    if (const auto* e = std::get_if<ExplicitRelation>(&def.body)) {
      for (const auto& [a, b] : e->edges) {
        for (OidId id : {a, b})
          if (!s.is_real(id))
            fail("relation '" + name + "' references missing oid " + std::to_string(id));
      }
    }
  }
  try {
    check_composites(s.relations);
  } catch (const Error& e) {
    fail(e.what());
  }
  std::map<std::string, std::string> seen;
  for (const auto& [name, def] : s.classes) {
    auto [it, inserted] = seen.emplace(def.intent.text(), name);
    if (!inserted) fail("classes '" + it->second + "' and '" + name + "' share an intent");
  }
}

}  // namespace classalg
