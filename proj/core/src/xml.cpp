#include "xml.hpp"

#include <cstdint>

namespace gridblock::xml
{

std::optional<std::string> Element::attribute(std::string_view key) const
{
  for (const auto & [k, v] : attributes) {
    if (local_name(k) == key) return v;
  }
  return std::nullopt;
}

std::string_view local_name(std::string_view name)
{
  const auto colon = name.find(':');
  return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

namespace
{

bool is_name_start(char c)
{
  const auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.'; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string & out, std::uint32_t cp)
{
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Reader
{
public:
  explicit Reader(std::string_view text) : src_(text) {}

  Element document()
  {
    skip_bom();
    skip_misc();
    if (!starts_with("<")) fail("expected root element");
    Element root = element();
    skip_misc();
    if (pos_ != src_.size()) fail("content after root element");
    return root;
  }

private:
  [[noreturn]] void fail(const std::string & msg) const { throw SyntaxError(msg, pos_); }

  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void expect(std::string_view s)
  {
    if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
    pos_ += s.size();
  }

  void skip_bom()
  {
    if (starts_with("\xEF\xBB\xBF")) pos_ += 3;
  }

  void skip_space()
  {
    while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
  }

  void skip_until(std::string_view terminator, const char * what)
  {
    const auto end = src_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Whitespace, comments and processing instructions outside the root.
  void skip_misc()
  {
    for (;;) {
      skip_space();
      if (starts_with("<?")) {
        pos_ += 2;
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
      } else if (starts_with("<!DOCTYPE")) {
        fail("DTDs are not supported");
      } else {
        return;
      }
    }
  }

  std::string name()
  {
    if (pos_ >= src_.size() || !is_name_start(src_[pos_])) fail("expected a name");
    const auto start = pos_;
    while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  void reference(std::string & out)
  {
    const auto semi = src_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("bad entity reference");
    const auto ent = src_.substr(pos_ + 1, semi - pos_ - 1);
    if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "amp") out.push_back('&');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (ent.size() > 1 && ent[0] == '#') {
      const bool hex = ent[1] == 'x';
      const auto digits = ent.substr(hex ? 2 : 1);
      if (digits.empty()) fail("bad character reference");
      std::uint32_t cp = 0;
      for (char c : digits) {
        int v = -1;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        if (v < 0) fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      if (cp == 0) fail("character reference out of range");
      append_utf8(out, cp);
    } else {
      fail("unknown entity '" + std::string(ent) + "'");
    }
    pos_ = semi + 1;
  }

  std::string attribute_value()
  {
    if (pos_ >= src_.size() || (src_[pos_] != '"' && src_[pos_] != '\'')) fail("expected quoted value");
    const char quote = src_[pos_++];
    std::string value;
    while (pos_ < src_.size() && src_[pos_] != quote) {
      const char c = src_[pos_];
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        reference(value);
      } else {
        value.push_back(c);
        ++pos_;
      }
    }
    if (pos_ >= src_.size()) fail("unterminated attribute value");
    ++pos_;
    return value;
  }

  Element element()
  {
    if (++depth_ > kMaxDepth) fail("nesting too deep");
    expect("<");
    Element el;
    el.name = name();
    for (;;) {
      const bool had_space = pos_ < src_.size() && is_space(src_[pos_]);
      skip_space();
      if (starts_with("/>")) {
        pos_ += 2;
        --depth_;
        return el;
      }
      if (starts_with(">")) {
        ++pos_;
        break;
      }
      if (!had_space) fail("expected whitespace before attribute");
      auto key = name();
      for (const auto & [k, v] : el.attributes) {
        if (k == key) fail("duplicate attribute '" + key + "'");
      }
      skip_space();
      expect("=");
      skip_space();
      el.attributes.emplace_back(std::move(key), attribute_value());
    }

    for (;;) {
      if (pos_ >= src_.size()) fail("unterminated element <" + el.name + ">");
      if (starts_with("</")) {
        pos_ += 2;
        const auto closing = name();
        if (closing != el.name) fail("mismatched </" + closing + ">, expected </" + el.name + ">");
        skip_space();
        expect(">");
        --depth_;
        return el;
      }
      if (starts_with("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA");
        el.text.append(src_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        pos_ += 2;
        skip_until("?>", "processing instruction");
      } else if (starts_with("<!")) {
        fail("unsupported markup declaration");
      } else if (starts_with("<")) {
        el.children.push_back(element());
      } else if (src_[pos_] == '&') {
        reference(el.text);
      } else {
        el.text.push_back(src_[pos_++]);
      }
    }
  }

  static constexpr int kMaxDepth = 512;

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

Element parse(std::string_view text) { return Reader(text).document(); }

std::string escape(std::string_view raw, bool in_attribute)
{
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"':
        if (in_attribute) out += "&quot;";
        else out.push_back(c);
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace gridblock::xml
