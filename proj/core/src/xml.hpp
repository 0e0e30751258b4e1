// xml.hpp - minimal well-formedness-checking XML reader and writer
//
// Covers what Blockly workspaces need: elements, attributes, character data,
// the five predefined entities plus numeric references, comments, CDATA and
// processing instructions. DTDs are rejected.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gridblock::xml
{

struct Element
{
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;  // concatenated character data of this element only

  std::optional<std::string> attribute(std::string_view key) const;
};

class SyntaxError : public std::runtime_error
{
public:
  SyntaxError(const std::string & what, std::size_t offset)
  : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset)
  {
  }
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Parse a complete document and return its root element.
Element parse(std::string_view text);

std::string escape(std::string_view raw, bool in_attribute = false);

/// Local part of a possibly prefixed name ("b:block" -> "block").
std::string_view local_name(std::string_view name);

}  // namespace gridblock::xml
