#include "formlet/decls.hpp"

#include "formlet/error.hpp"

namespace formlet {

Declarations::Declarations() {
  // The Kronecker delta is always available.  It sits at head id 0 so it
  // sorts before every user head.
  HeadDecl d;
  d.id = 0;
  d.name = "d_";
  d.kind = HeadKind::CTensor;
  d.sym = Symmetry::Symmetric;
  d.is_delta = true;
  heads_.push_back(d);
  head_ids_["d_"] = 0;
  delta_head_ = 0;
}

bool Declarations::name_taken(const std::string& name) const {
  return symbol_ids_.count(name) || index_ids_.count(name) ||
         head_ids_.count(name) || set_ids_.count(name);
}

static void require_fresh(const Declarations& d, const std::string& name) {
  if (d.name_taken(name))
    throw Error(ErrorKind::DuplicateName, "name already declared: " + name);
}

int Declarations::declare_symbol(const std::string& name) {
  require_fresh(*this, name);
  int id = (int)symbols_.size();
  symbols_.push_back(name);
  symbol_ids_[name] = id;
  return id;
}

int Declarations::declare_index(const std::string& name) {
  require_fresh(*this, name);
  IndexDecl ix;
  ix.id = (int)indices_.size();
  ix.name = name;
  ix.open = name.size() >= 2 && name.front() == '[' && name.back() == ']';
  indices_.push_back(ix);
  index_ids_[name] = ix.id;
  return ix.id;
}

void Declarations::declare_autodeclare_prefix(const std::string& prefix) {
  auto_prefixes_.push_back(prefix);
}

int Declarations::declare_head(const std::string& name, HeadKind kind, Symmetry sym) {
  require_fresh(*this, name);
  HeadDecl h;
  h.id = (int)heads_.size();
  h.name = name;
  h.kind = kind;
  h.sym = sym;
  heads_.push_back(h);
  head_ids_[name] = h.id;
  return h.id;
}

int Declarations::declare_set(const std::string& name, std::vector<int> members) {
  require_fresh(*this, name);
  SetDecl s;
  s.id = (int)sets_.size();
  s.name = name;
  s.members = std::move(members);
  sets_.push_back(s);
  set_ids_[name] = s.id;
  return s.id;
}

static int find_in(const std::unordered_map<std::string, int>& m, const std::string& k) {
  auto it = m.find(k);
  return it == m.end() ? -1 : it->second;
}

int Declarations::find_symbol(const std::string& name) const { return find_in(symbol_ids_, name); }
int Declarations::find_index(const std::string& name) const { return find_in(index_ids_, name); }
int Declarations::find_head(const std::string& name) const { return find_in(head_ids_, name); }
int Declarations::find_set(const std::string& name) const { return find_in(set_ids_, name); }

int Declarations::resolve_index(const std::string& name) {
  int id = find_index(name);
  if (id >= 0) return id;
  bool bracketed = name.size() >= 2 && name.front() == '[' && name.back() == ']';
  for (const auto& p : auto_prefixes_) {
    bool hit = bracketed ? name == p
                         : name.size() >= p.size() && name.compare(0, p.size(), p) == 0;
    if (hit) {
      if (name_taken(name)) return -1;  // an explicit non-index wins
      return declare_index(name);
    }
  }
  return -1;
}

}  // namespace formlet
