#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fixture {

// Formatting-cleanup conformance cases: fence stripping, hook removal (spaced
// and tight), `[Char]` respelling, trimming. Expectations are exact strings.
struct PostprocessCase {
  const char* label;
  std::string raw;
  std::string hook;
  std::optional<std::string> expected;
};

inline std::vector<PostprocessCase> postprocess_cases() {
  return {
      {"plain fenced block",
       "```\nbreak :: (a -> Bool) -> [a] -> ([a],[a])\n```",
       "break ::",
       "(a -> Bool) -> [a] -> ([a],[a])"},
      {"fence with language tag",
       "```haskell\nbreak :: (a -> Bool) -> [a] -> ([a],[a])\n```",
       "break ::",
       "(a -> Bool) -> [a] -> ([a],[a])"},
      {"hook repeated",
       "break :: break :: a -> a",
       "break ::",
       "a -> a"},
      {"hook without space",
       "break:: a -> a",
       "break ::",
       "a -> a"},
      {"char list respelled",
       "f1 :: [Char] -> [Char]",
       "f1 ::",
       "String -> String"},
      {"nested char list",
       "f1 :: [[Char]] -> Int",
       "f1 ::",
       "[String] -> Int"},
      {"empty response",
       "",
       "break ::",
       std::nullopt},
      {"whitespace only",
       "  \n\t ",
       "break ::",
       std::nullopt},
      {"fences only",
       "```\n```",
       "break ::",
       std::nullopt},
      {"no hook present",
       "(a -> b) -> a -> b",
       "break ::",
       "(a -> b) -> a -> b"},
      {"surrounding blank lines",
       "\n\na -> a\n\n",
       "break ::",
       "a -> a"},
      {"hook inside prose",
       "The answer is break :: a -> a",
       "break ::",
       "The answer is  a -> a"},
      {"crlf line endings",
       "break :: a -> a\r\n",
       "break ::",
       "a -> a"},
      {"indented fences",
       "  ```\nbreak :: Int\n  ```",
       "break ::",
       "Int"},
      {"string already spelled",
       "break :: String -> String",
       "break ::",
       "String -> String"},
      {"fence, hook and char list together",
       "```haskell\nbreak :: [Char] -> Bool\n```",
       "break ::",
       "String -> Bool"},
      {"continuation from the hook",
       " (a -> Bool) -> [a] -> ([a],[a])",
       "break ::",
       "(a -> Bool) -> [a] -> ([a],[a])"},
      {"hook quoted in backticks",
       "`break ::` a -> a",
       "break ::",
       "`` a -> a"},
      {"signature inside prose lines",
       "Sure!\nbreak :: a -> a\nHope this helps.",
       "break ::",
       "Sure!\n a -> a\nHope this helps."},
      {"char suffix constructor untouched",
       "break :: [MyChar] -> Int",
       "break ::",
       "[MyChar] -> Int"},
  };
}

}  // namespace fixture
