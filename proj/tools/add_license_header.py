#!/usr/bin/env python3
# Copyright 2026 The DomainHarvester Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Prepends the Apache-2.0 header to project sources. Idempotent."""
import pathlib
import sys

HEADER = [
    "Copyright 2026 The DomainHarvester Authors",
    "",
    'Licensed under the Apache License, Version 2.0 (the "License");',
    "you may not use this file except in compliance with the License.",
    "You may obtain a copy of the License at",
    "",
    "    http://www.apache.org/licenses/LICENSE-2.0",
    "",
    "Unless required by applicable law or agreed to in writing, software",
    'distributed under the License is distributed on an "AS IS" BASIS,',
    "WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.",
    "See the License for the specific language governing permissions and",
    "limitations under the License.",
]
DIRS = ["src", "include", "tests", "tools", "bench"]
C_SUFFIXES = {".cpp", ".hpp", ".h", ".cc"}


def comment(prefix):
    return "".join((prefix + " " + line).rstrip() + "\n" for line in HEADER) + "\n"


def apply(path, prefix):
    text = path.read_text(encoding="utf-8")
    if HEADER[0] in text.split("\n", 3)[0] + text.split("\n", 3)[1]:
        return False
    head = ""
    if text.startswith("#!"):
        head, _, text = text.partition("\n")
        head += "\n"
    path.write_text(head + comment(prefix) + text, encoding="utf-8")
    return True


def main():
    root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".").resolve()
    changed = 0
    for d in DIRS:
        for p in sorted((root / d).rglob("*")):
            if p.suffix in C_SUFFIXES:
                changed += apply(p, "//")
            elif p.name == "CMakeLists.txt" or p.suffix in {".py", ".sh"}:
                changed += apply(p, "#")
    changed += apply(root / "CMakeLists.txt", "#")
    print(f"{changed} files updated")


if __name__ == "__main__":
    main()
