#include <fstream>
#include <sstream>

#include "cwac/bratteli.hpp"

namespace cwac {

std::string serialize_diagram(const BratteliDiagram& d) {
  std::ostringstream os;
  os << "bratteli 1\n";
  if (d.stationary())
    os << "stationary " << d.head().size() << ' ' << d.period().size() << '\n';
  else
    os << "finite " << d.head().size() << '\n';
  auto emit = [&](const Transition& t) {
    os << "T " << t.source_count() << ' ' << t.range_count() << ' ' << t.edges().size() << '\n';
    for (const Edge& e : t.edges()) os << e.source << ' ' << e.range << ' ' << e.rank << '\n';
  };
  for (const auto& t : d.head()) emit(t);
  for (const auto& t : d.period()) emit(t);
  return os.str();
}

namespace {

struct Token {
  std::string text;
  int line;
  int column;
};

// Whitespace-separated tokens grouped by line, comments stripped.
std::vector<std::vector<Token>> tokenize(const std::string& text) {
  std::vector<std::vector<Token>> lines;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < raw.size()) {
      if (std::isspace(static_cast<unsigned char>(raw[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      toks.push_back({raw.substr(i, j - i), line_no, static_cast<int>(i) + 1});
      i = j;
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

class Reader {
 public:
  explicit Reader(const std::string& text) : lines_(tokenize(text)) {}

  const std::vector<Token>& next(const char* what) {
    if (pos_ >= lines_.size()) throw ParseError(last_line_ + 1, 1, std::string("unexpected end of input, expected ") + what);
    last_line_ = lines_[pos_].front().line;
    return lines_[pos_++];
  }
  bool done() const { return pos_ >= lines_.size(); }
  const Token& peek() const { return lines_[pos_].front(); }

 private:
  std::vector<std::vector<Token>> lines_;
  std::size_t pos_ = 0;
  int last_line_ = 0;
};

void expect_arity(const std::vector<Token>& toks, std::size_t n, const char* what) {
  if (toks.size() != n) {
    const Token& at = toks.size() > n ? toks[n] : toks.back();
    throw ParseError(at.line, at.column, std::string("expected ") + what);
  }
}

long long to_int(const Token& t, long long lo, long long hi) {
  long long v = 0;
  std::size_t used = 0;
  try {
    v = std::stoll(t.text, &used);
  } catch (const std::exception&) {
    throw ParseError(t.line, t.column, "expected an integer, found '" + t.text + "'");
  }
  if (used != t.text.size()) throw ParseError(t.line, t.column, "expected an integer, found '" + t.text + "'");
  if (v < lo || v > hi)
    throw ParseError(t.line, t.column, "value " + t.text + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

}  // namespace

BratteliDiagram parse_diagram(const std::string& text) {
  Reader r(text);
  const auto& magic = r.next("header 'bratteli 1'");
  if (magic[0].text != "bratteli") throw ParseError(magic[0].line, magic[0].column, "expected header 'bratteli 1'");
  expect_arity(magic, 2, "format version after 'bratteli'");
  if (magic[1].text != "1") throw ParseError(magic[1].line, magic[1].column, "unsupported format version " + magic[1].text);

  const auto& kind = r.next("'stationary' or 'finite'");
  std::size_t head_count = 0, period_count = 0;
  if (kind[0].text == "stationary") {
    expect_arity(kind, 3, "'stationary <head> <period>'");
    head_count = static_cast<std::size_t>(to_int(kind[1], 0, 4096));
    period_count = static_cast<std::size_t>(to_int(kind[2], 1, 4096));
  } else if (kind[0].text == "finite") {
    expect_arity(kind, 2, "'finite <depth>'");
    head_count = static_cast<std::size_t>(to_int(kind[1], 1, 4096));
  } else {
    throw ParseError(kind[0].line, kind[0].column, "expected 'stationary' or 'finite', found '" + kind[0].text + "'");
  }

  std::vector<Transition> head, period;
  int expected_sources = -1;
  for (std::size_t i = 0; i < head_count + period_count; ++i) {
    const auto& hdr = r.next("transition header 'T <sources> <ranges> <edges>'");
    if (hdr[0].text != "T") throw ParseError(hdr[0].line, hdr[0].column, "expected transition header 'T', found '" + hdr[0].text + "'");
    expect_arity(hdr, 4, "'T <sources> <ranges> <edges>'");
    int sources = static_cast<int>(to_int(hdr[1], 1, 1 << 20));
    int ranges = static_cast<int>(to_int(hdr[2], 1, 1 << 20));
    long long edge_count = to_int(hdr[3], 0, 1 << 24);
    if (expected_sources >= 0 && sources != expected_sources)
      throw ParseError(hdr[1].line, hdr[1].column,
                       "transition has " + std::to_string(sources) + " sources but the previous level has " +
                           std::to_string(expected_sources) + " vertices");
    expected_sources = ranges;
    std::vector<Edge> edges;
    for (long long e = 0; e < edge_count; ++e) {
      const auto& toks = r.next("edge '<source> <range> <rank>'");
      expect_arity(toks, 3, "edge '<source> <range> <rank>'");
      edges.push_back({static_cast<int>(to_int(toks[0], 0, sources - 1)), static_cast<int>(to_int(toks[1], 0, ranges - 1)),
                       static_cast<int>(to_int(toks[2], 1, 1 << 24))});
    }
    try {
      (i < head_count ? head : period).emplace_back(sources, ranges, std::move(edges));
    } catch (const StructuralError& e) {
      throw ParseError(hdr[0].line, hdr[0].column, std::string("transition ") + std::to_string(i) + ": " + e.what());
    }
  }
  if (!r.done()) throw ParseError(r.peek().line, r.peek().column, "trailing content after the last transition");
  if (!period.empty() && period.back().range_count() != period.front().source_count())
    throw ParseError(1, 1, "period does not close: last range count differs from first source count");
  return BratteliDiagram(std::move(head), std::move(period));
}

BratteliDiagram load_diagram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open diagram file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_diagram(ss.str());
}

}  // namespace cwac
