#include <functional>
#include <string>
#include <string_view>

#include "binpat/error.hpp"
#include "binpat/patterns.hpp"

namespace binpat {

namespace {

using Lookup = std::function<BigInt(std::string_view)>;
using Side = std::function<BigInt(const Lookup&)>;

struct RelationTemplate {
  std::string name;
  Side lhs;
  Side rhs;
  bool has_complement;
};

std::string flip_digits(std::string s) {
  for (char& c : s) {
    if (c == '0') {
      c = '1';
    } else if (c == '1') {
      c = '0';
    }
  }
  return s;
}

BigInt C(const BigInt& n, long k) { return binomial(n, k); }

std::vector<RelationTemplate> relation_templates(std::size_t n) {
  std::vector<RelationTemplate> t;
  const BigInt length(n);

  t.push_back({"N0+N1=n", [](const Lookup& N) { return BigInt(N("0") + N("1")); },
               [length](const Lookup&) { return length; }, false});

  // length 2
  t.push_back({"N00=C(N0,2)", [](const Lookup& N) { return N("00"); },
               [](const Lookup& N) { return C(N("0"), 2); }, true});
  t.push_back({"N01+N10=N0*N1", [](const Lookup& N) { return BigInt(N("01") + N("10")); },
               [](const Lookup& N) { return BigInt(N("0") * N("1")); }, false});

  // length 3, linear
  t.push_back({"N000=C(N0,3)", [](const Lookup& N) { return N("000"); },
               [](const Lookup& N) { return C(N("0"), 3); }, true});
  t.push_back({"N001+N010+N100=C(N0,2)*N1",
               [](const Lookup& N) { return BigInt(N("001") + N("010") + N("100")); },
               [](const Lookup& N) { return BigInt(C(N("0"), 2) * N("1")); }, true});

  // N_0 N_10 family
  t.push_back({"N0*N10=N010+2N100+N10", [](const Lookup& N) { return BigInt(N("0") * N("10")); },
               [](const Lookup& N) { return BigInt(N("010") + 2 * N("100") + N("10")); }, true});
  t.push_back({"N0*N01=N010+2N001+N01", [](const Lookup& N) { return BigInt(N("0") * N("01")); },
               [](const Lookup& N) { return BigInt(N("010") + 2 * N("001") + N("01")); }, true});

  // length 4, linear: sum over words with k ones = C(N0,4-k) C(N1,k)
  for (long k = 0; k <= 4; ++k) {
    std::string name = "sum{|w|=4,ones=" + std::to_string(k) + "}Nw=C(N0," + std::to_string(4 - k) + ")*C(N1," +
                       std::to_string(k) + ")";
    t.push_back({std::move(name),
                 [k](const Lookup& N) {
                   BigInt s = 0;
                   for (const auto& w : all_words(4)) {
                     if (static_cast<long>(w.ones()) == k) s += N(w.str());
                   }
                   return s;
                 },
                 [k](const Lookup& N) { return BigInt(C(N("0"), 4 - k) * C(N("1"), k)); }, false});
  }

  // N_0 times a length-3 pattern
  t.push_back({"N0*N001=3N0001+N0010+2N001", [](const Lookup& N) { return BigInt(N("0") * N("001")); },
               [](const Lookup& N) { return BigInt(3 * N("0001") + N("0010") + 2 * N("001")); }, true});
  t.push_back({"N0*N010=2N0010+2N0100+2N010", [](const Lookup& N) { return BigInt(N("0") * N("010")); },
               [](const Lookup& N) { return BigInt(2 * N("0010") + 2 * N("0100") + 2 * N("010")); }, true});
  t.push_back({"N0*N100=3N1000+N0100+2N100", [](const Lookup& N) { return BigInt(N("0") * N("100")); },
               [](const Lookup& N) { return BigInt(3 * N("1000") + N("0100") + 2 * N("100")); }, true});
  t.push_back({"N0*N011=2N0011+N0101+N0110+N011", [](const Lookup& N) { return BigInt(N("0") * N("011")); },
               [](const Lookup& N) { return BigInt(2 * N("0011") + N("0101") + N("0110") + N("011")); }, true});
  t.push_back({"N0*N101=N0101+2N1001+N1010+N101", [](const Lookup& N) { return BigInt(N("0") * N("101")); },
               [](const Lookup& N) { return BigInt(N("0101") + 2 * N("1001") + N("1010") + N("101")); }, true});
  t.push_back({"N0*N110=N0110+N1010+2N1100+N110", [](const Lookup& N) { return BigInt(N("0") * N("110")); },
               [](const Lookup& N) { return BigInt(N("0110") + N("1010") + 2 * N("1100") + N("110")); }, true});

  // quadratic
  t.push_back({"N10^2=2N1010+4N1100+2N110+2N100+N10", [](const Lookup& N) { return BigInt(N("10") * N("10")); },
               [](const Lookup& N) {
                 return BigInt(2 * N("1010") + 4 * N("1100") + 2 * N("110") + 2 * N("100") + N("10"));
               },
               true});
  t.push_back({"N1001=N1*N100+N110-C(N10,2)", [](const Lookup& N) { return N("1001"); },
               [](const Lookup& N) { return BigInt(N("1") * N("100") + N("110") - C(N("10"), 2)); }, true});
  return t;
}

}  // namespace

std::vector<RelationCheck> check_relations(const BinaryWord& host) {
  if (host.size() < 4) throw InvalidArgument("check_relations: host length must be >= 4");
  const auto counts = count_all(host, 4);
  const Lookup direct = [&](std::string_view w) { return counts.at(BinaryWord::parse(w)); };
  const Lookup flipped = [&](std::string_view w) { return counts.at(BinaryWord::parse(w).complement()); };

  std::vector<RelationCheck> out;
  for (const auto& rel : relation_templates(host.size())) {
    BigInt l = rel.lhs(direct);
    BigInt r = rel.rhs(direct);
    out.push_back({rel.name, l, r, l == r});
    if (rel.has_complement) {
      l = rel.lhs(flipped);
      r = rel.rhs(flipped);
      out.push_back({flip_digits(rel.name), l, r, l == r});
    }
  }
  return out;
}

}  // namespace binpat
