#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "formlet/bigint.hpp"
#include "formlet/rational.hpp"

namespace formlet {

enum class HeadKind { Function, CFunction, NTensor, CTensor };
enum class Symmetry { None, Symmetric, Antisymmetric };

struct HeadDecl {
  int id = -1;
  std::string name;
  HeadKind kind = HeadKind::Function;
  Symmetry sym = Symmetry::None;
  bool is_delta = false;

  bool commuting() const {
    return kind == HeadKind::CFunction || kind == HeadKind::CTensor;
  }
};

struct IndexDecl {
  int id = -1;
  std::string name;
  bool open = false;  // bracketed name such as [a]; never implicitly summed
};

struct SetDecl {
  int id = -1;
  std::string name;
  std::vector<int> members;  // head ids, in declaration order
};

// Session-wide declaration tables.  Ids double as canonical ranks: symbols
// order polynomial variables, index/head ids order indices and factors.
class Declarations {
 public:
  Declarations();

  int declare_symbol(const std::string& name);
  int declare_index(const std::string& name);
  void declare_autodeclare_prefix(const std::string& prefix);
  int declare_head(const std::string& name, HeadKind kind, Symmetry sym);
  int declare_set(const std::string& name, std::vector<int> members);

  void set_dimension_symbol(int sym) { dim_ = sym; }
  void set_dimension_value(Int v) { dim_ = std::move(v); }
  bool has_dimension() const { return !std::holds_alternative<std::monostate>(dim_); }
  bool dimension_is_symbol() const { return std::holds_alternative<int>(dim_); }
  int dimension_symbol() const { return std::get<int>(dim_); }
  const Int& dimension_value() const { return std::get<Int>(dim_); }

  void set_ratfun(int head) { ratfun_head_ = head; }
  void set_ratfun_expansion(int head, ExpansionSetting s) {
    ratfun_head_ = head;
    expansion_ = s;
  }
  int ratfun_head() const { return ratfun_head_; }
  const std::optional<ExpansionSetting>& expansion() const { return expansion_; }

  int find_symbol(const std::string& name) const;
  int find_index(const std::string& name) const;
  int find_head(const std::string& name) const;
  int find_set(const std::string& name) const;
  // Exact index lookup, then autodeclare creation: a bracketed prefix matches
  // only the identical name, a plain prefix matches any name starting with it.
  int resolve_index(const std::string& name);
  // True when any declaration (symbol/index/head/set) already uses the name.
  bool name_taken(const std::string& name) const;

  const std::string& symbol_name(int id) const { return symbols_[id]; }
  const IndexDecl& index(int id) const { return indices_[id]; }
  const HeadDecl& head(int id) const { return heads_[id]; }
  const SetDecl& set(int id) const { return sets_[id]; }
  int symbol_count() const { return (int)symbols_.size(); }
  int index_count() const { return (int)indices_.size(); }
  int head_count() const { return (int)heads_.size(); }

  int delta_head() const { return delta_head_; }

 private:
  std::vector<std::string> symbols_;
  std::vector<IndexDecl> indices_;
  std::vector<HeadDecl> heads_;
  std::vector<SetDecl> sets_;
  std::vector<std::string> auto_prefixes_;
  std::unordered_map<std::string, int> symbol_ids_, index_ids_, head_ids_, set_ids_;
  std::variant<std::monostate, int, Int> dim_;
  int ratfun_head_ = -1;
  std::optional<ExpansionSetting> expansion_;
  int delta_head_ = -1;
};

}  // namespace formlet
