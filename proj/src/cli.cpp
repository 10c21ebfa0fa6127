#include "ordlab/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ordlab/cnf.hpp"
#include "ordlab/embedding.hpp"
#include "ordlab/errors.hpp"
#include "ordlab/hausdorff.hpp"
#include "ordlab/sigma2.hpp"

namespace ordlab {

namespace {

using json = nlohmann::ordered_json;

// Stage-base entries print as plain numerals, the top point as "w".
json stageEntryJson(const Code& c) {
  if (!c.isLeaf() && c.parts().size() == 2 && c.parts()[0].isLeaf()) {
    if (c.parts()[0].leaf() == 0) return c.parts()[1].leaf();
    return "w";
  }
  return c.toJson();
}

json cnfJson(const CnfSeq& seq) {
  json j;
  j["base"] = seq.base().show();
  auto entries = json::array();
  bool stageBase = seq.base() == cnfStageBase();
  for (const auto& e : seq.entries()) entries.push_back(stageBase ? stageEntryJson(e) : e.toJson());
  j["entries"] = std::move(entries);
  return j;
}

json traceJson(const std::vector<StageCount>& trace) {
  auto arr = json::array();
  for (const auto& sc : trace) {
    json e;
    if (sc.stage.limit)
      e["stage"] = "w";
    else
      e["stage"] = sc.stage.value;
    e["classes"] = sc.classes;
    arr.push_back(std::move(e));
  }
  return arr;
}

std::vector<uint64_t> parseIndexList(const std::string& src) {
  std::vector<uint64_t> out;
  size_t pos = 0;
  auto skipWs = [&] {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  };
  skipWs();
  if (pos >= src.size() || src[pos] != '[') throw ParseError("expected '['", pos);
  ++pos;
  skipWs();
  if (pos < src.size() && src[pos] == ']') return out;
  while (true) {
    skipWs();
    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
      throw ParseError("expected a number", pos);
    uint64_t v = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
      v = v * 10 + static_cast<uint64_t>(src[pos++] - '0');
    out.push_back(v);
    skipWs();
    if (pos < src.size() && src[pos] == ',') {
      ++pos;
      continue;
    }
    break;
  }
  skipWs();
  if (pos >= src.size() || src[pos] != ']') throw ParseError("expected ']'", pos);
  ++pos;
  skipWs();
  if (pos != src.size()) throw ParseError("trailing input", pos);
  return out;
}

std::string yesNo(bool b) { return b ? "yes" : "no"; }

struct Options {
  std::string format = "text";
  uint64_t prefixSize = 40;
  uint64_t budget = 10000;
  uint64_t i = 0, j = 1;
  bool primed = false;
};

void emit(std::ostream& os, const Options& opt, const json& j,
          const std::function<void(std::ostream&)>& text) {
  if (opt.format == "json")
    os << j.dump(2) << "\n";
  else
    text(os);
}

int dispatch(const std::string& cmd, const std::vector<std::string>& positionals,
             const Options& opt, std::ostream& out) {
  if (cmd == "parse") {
    OrderTerm t = parseTerm(positionals.at(0));
    json j;
    j["schema"] = 1;
    j["term"] = t.show();
    j["depth"] = t.depth();
    emit(out, opt, j, [&](std::ostream& os) { os << t.show() << "\n"; });
    return 0;
  }

  if (cmd == "classify") {
    OrderTerm t = parseTerm(positionals.at(0));
    OrderClass c = classify(t);
    json j;
    j["schema"] = 1;
    j["term"] = t.show();
    j["wellOrder"] = c.isWellOrder;
    j["weakWellOrder"] = c.isWeakWellOrder;
    j["scattered"] = c.isScattered;
    emit(out, opt, j, [&](std::ostream& os) {
      os << "term:            " << t.show() << "\n";
      os << "well order:      " << yesNo(c.isWellOrder) << "\n";
      os << "weak well order: " << yesNo(c.isWeakWellOrder) << "\n";
      os << "scattered:       " << yesNo(c.isScattered) << "\n";
    });
    return 0;
  }

  if (cmd == "cnf" || cmd == "rank") {
    OrderTerm t = parseTerm(positionals.at(0));
    RankResult r = rank(t);
    json j;
    j["schema"] = 1;
    j["term"] = t.show();
    if (r.rank.limit)
      j["rank"] = "w";
    else
      j["rank"] = r.rank.value;
    j["trace"] = traceJson(r.trace);
    CnfSeq seq = cnfViaHausdorff(t);
    j["cnf"] = cnfJson(seq);
    emit(out, opt, j, [&](std::ostream& os) {
      os << "term: " << t.show() << "\n";
      os << "rank: " << r.rank.show() << "\n";
      os << "trace:";
      for (const auto& sc : r.trace) os << " " << sc.stage.show() << ":" << sc.classes;
      os << "\n";
      os << "cnf entries:";
      for (const auto& e : seq.entries()) {
        if (e == stageCodeOmega())
          os << " w";
        else
          os << " " << e.parts()[1].leaf();
      }
      os << "\n";
    });
    return 0;
  }

  if (cmd == "add") {
    OrderTerm base = parseTerm(positionals.size() > 2 ? positionals.at(2) : "w");
    CnfSeq a = cnfFromIndices(base, parseIndexList(positionals.at(0)));
    CnfSeq b = cnfFromIndices(base, parseIndexList(positionals.at(1)));
    CnfSeq sum = cnfAdd(a, b);
    json j;
    j["schema"] = 1;
    j["base"] = base.show();
    j["sum"] = cnfJson(sum);
    emit(out, opt, j, [&](std::ostream& os) {
      os << "[";
      for (size_t k = 0; k < sum.entries().size(); ++k) {
        if (k) os << ",";
        os << sum.entries()[k].repr();
      }
      os << "]\n";
    });
    return 0;
  }

  if (cmd == "derive") {
    OrderTerm t = parseTerm(positionals.at(0));
    auto p = denote(t);
    uint64_t stageWanted = opt.i;  // reuse --i as the stage selector
    std::vector<StageRelation> stages{initialStage(p, opt.prefixSize)};
    for (uint64_t s = 0; s < stageWanted; ++s)
      stages.push_back(derivativeStep(p, stages.back()));
    json j;
    j["schema"] = 1;
    j["term"] = t.show();
    auto arr = json::array();
    for (const auto& st : stages) {
      json e;
      e["stage"] = st.stage.value;
      e["classes"] = st.classCount;
      arr.push_back(std::move(e));
    }
    j["stages"] = std::move(arr);
    emit(out, opt, j, [&](std::ostream& os) {
      for (const auto& st : stages)
        os << "stage " << st.stage.show() << ": " << st.classCount << " classes\n";
    });
    return 0;
  }

  if (cmd == "embed") {
    OrderTerm domT = parseTerm(positionals.at(0));
    OrderTerm codT = parseTerm(positionals.at(1));
    SearchResult r = searchEmbedding(*denote(domT), *denote(codT), opt.prefixSize);
    json j;
    j["schema"] = 1;
    j["dom"] = domT.show();
    j["cod"] = codT.show();
    j["found"] = r.found;
    if (r.found) {
      auto pairs = json::array();
      for (const auto& [a, b] : r.map) pairs.push_back({a.toJson(), b.toJson()});
      j["map"] = std::move(pairs);
    } else {
      j["noneUpTo"] = r.noneUpTo;
    }
    emit(out, opt, j, [&](std::ostream& os) {
      if (r.found)
        os << "found an order-preserving map on " << r.map.size() << " points\n";
      else
        os << "none up to prefix " << r.noneUpTo << "\n";
    });
    return 0;
  }

  if (cmd == "wwo-check") {
    OrderTerm t = parseTerm(positionals.at(0));
    OrderClass c = classify(t);
    json j;
    j["schema"] = 1;
    j["term"] = t.show();
    j["weakWellOrder"] = c.isWeakWellOrder;
    if (!c.isWeakWellOrder) {
      EmbeddingWitness w = selfEmbedAny(t);
      auto p = denote(t);
      VerifyResult vr = verifyEmbedding(w, *p, *p, opt.prefixSize);
      j["witness"] = w.toJson();
      j["witnessVerified"] = vr.verified;
      if (!vr.verified) throw InternalError("refuting witness failed verification");
    }
    emit(out, opt, j, [&](std::ostream& os) {
      os << "term: " << t.show() << "\n";
      os << "weak well order: " << yesNo(c.isWeakWellOrder) << "\n";
      if (!c.isWeakWellOrder)
        os << "refuted by a verified self-embedding into a proper initial segment\n";
    });
    return 0;
  }

  if (cmd == "self-embed") {
    OrderTerm t = parseTerm(positionals.at(0));
    EmbeddingWitness w = selfEmbedAny(t);
    auto p = denote(t);
    VerifyResult vr = verifyEmbedding(w, *p, *p, opt.prefixSize);
    if (!vr.verified) throw InternalError("self-embedding failed verification");
    json j;
    j["schema"] = 1;
    j["term"] = t.show();
    j["witness"] = w.toJson();
    j["verifiedOnPrefix"] = opt.prefixSize;
    emit(out, opt, j, [&](std::ostream& os) {
      os << "verified self-embedding of " << t.show()
         << " strictly below " << w.claimedBound->repr() << "\n";
    });
    return 0;
  }

  if (cmd == "refute") {
    OrderTerm base = parseTerm(positionals.size() > 1 ? positionals.at(1) : "w");
    CnfSeq sigma = cnfFromIndices(base, parseIndexList(positionals.at(0)));
    EmbeddingWitness adversary = adversarialSegmentMap(sigma, opt.i);
    SegmentCheckResult r = checkNoSegmentSelfEmbedding(sigma, adversary, opt.budget);
    json j;
    j["schema"] = 1;
    j["sigma"] = cnfJson(sigma);
    j["adversarySeed"] = opt.i;
    switch (r.kind) {
      case SegmentCheckResult::Kind::Vacuous: j["result"] = "vacuous"; break;
      case SegmentCheckResult::Kind::Violation: {
        j["result"] = "violation";
        j["pair"] = {r.violation->first.toJson(), r.violation->second.toJson()};
        break;
      }
      case SegmentCheckResult::Kind::Refuted: {
        j["result"] = "refuted";
        auto steps = json::array();
        for (const auto& st : r.trace->steps)
          steps.push_back({{"y", st.exponent.toJson()}, {"k", st.k}, {"m", st.m}});
        j["trace"] = std::move(steps);
        switch (r.trace->terminal) {
          case RefutationTrace::Terminal::OrderViolation: j["terminal"] = "orderViolation"; break;
          case RefutationTrace::Terminal::CodomainEscape: j["terminal"] = "codomainEscape"; break;
          case RefutationTrace::Terminal::ExponentOverflow:
            j["terminal"] = "exponentOverflow";
            break;
          case RefutationTrace::Terminal::BudgetExceeded: j["terminal"] = "budgetExceeded"; break;
        }
        if (r.trace->terminal == RefutationTrace::Terminal::BudgetExceeded)
          throw BudgetError("refutation ran out of budget");
        break;
      }
    }
    emit(out, opt, j, [&](std::ostream& os) { os << j["result"].get<std::string>() << "\n"; });
    return 0;
  }

  if (cmd == "sigma2") {
    if (positionals.at(0) != "demo") throw DomainError("unknown sigma2 action");
    std::ifstream in(positionals.at(1));
    if (!in) throw DomainError("cannot open instance file: " + positionals.at(1));
    nlohmann::json instJson = nlohmann::json::parse(in);
    Sigma2Instance inst = Sigma2Instance::fromJson(instJson);
    EmbeddingWitness F = constructEmbedding(inst, opt.i, opt.j, opt.primed);
    positionalInvariantCheck(inst, opt.i, opt.j, F, opt.primed);
    ExtractionReport report = extractX(inst, opt.i, opt.j, F, opt.primed);
    json j;
    j["schema"] = 1;
    j["instance"] = inst.toJson();
    j["report"] = report.toJson();
    emit(out, opt, j, [&](std::ostream& os) {
      os << (opt.primed ? "primed" : "unprimed") << " families, i=" << opt.i << " j=" << opt.j
         << "\n";
      os << "x | psi | via\n";
      for (const auto& pr : report.perPosition)
        os << pr.x << " | " << (pr.psi ? "true " : "false") << " | " << pr.via << "\n";
      os << "X = {";
      for (size_t k = 0; k < report.spillSet.size(); ++k) {
        if (k) os << ",";
        os << report.spillSet[k];
      }
      os << "}\n";
    });
    return 0;
  }

  throw DomainError("unknown subcommand: " + cmd);
}

}  // namespace

CliResult runCli(const std::vector<std::string>& args) {
  CLI::App app{"ordlab: computing with countable linear orders"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--format", opt.format)->check(CLI::IsMember({"json", "text"}));
  app.add_option("--prefix", opt.prefixSize);
  app.add_option("--budget", opt.budget);
  app.add_option("--i", opt.i);
  app.add_option("--j", opt.j);
  app.add_flag("--primed", opt.primed);

  struct Sub {
    const char* name;
    const char* help;
    size_t minArgs;
    size_t maxArgs;
  };
  const Sub subs[] = {
      {"parse", "parse a term and print its canonical form", 1, 1},
      {"classify", "well order / weak well order / scattered", 1, 1},
      {"cnf", "Cantor normal form with rank and stage trace", 1, 1},
      {"rank", "Hausdorff rank with stage trace", 1, 1},
      {"add", "sum of two sequences over a base term", 2, 3},
      {"derive", "stage relations on a prefix (--i selects the stage)", 1, 1},
      {"embed", "bounded embedding search between two terms", 2, 2},
      {"wwo-check", "weak-well-order check with witness on failure", 1, 1},
      {"self-embed", "self-embedding into a proper initial segment", 1, 1},
      {"refute", "refute a seeded adversary against a segment (--i seeds)", 1, 2},
      {"sigma2", "sigma2 demo <file> --i I --j J [--primed]", 2, 2},
  };
  std::map<std::string, std::vector<std::string>> positionals;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("args", positionals[s.name])
        ->expected(static_cast<int>(s.minArgs), static_cast<int>(s.maxArgs));
    // global flags are accepted after the subcommand as well
    sub->add_option("--format", opt.format)->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--prefix", opt.prefixSize);
    sub->add_option("--budget", opt.budget);
    sub->add_option("--i", opt.i);
    sub->add_option("--j", opt.j);
    sub->add_flag("--primed", opt.primed);
  }

  CliResult res;
  std::ostringstream out, err;
  try {
    std::vector<const char*> argv;
    argv.push_back("ordlab");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
    std::string cmd;
    for (const auto& s : subs)
      if (app.get_subcommand(s.name)->parsed()) cmd = s.name;
    res.exitCode = dispatch(cmd, positionals[cmd], opt, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    res.exitCode = 1;
  } catch (const BudgetError& e) {
    err << "budget error: " << e.what() << "\n";
    res.exitCode = 2;
  } catch (const OutOfRangeError& e) {
    err << "out of range: " << e.what() << "\n";
    res.exitCode = 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    res.exitCode = 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    res.exitCode = 1;
  }
  res.out = out.str();
  res.err = err.str();
  return res;
}

}  // namespace ordlab
