# Copyright 2026 The Authors.
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

"""Regenerates the small embedding fixtures used by the unit tests."""
import struct
from pathlib import Path

HERE = Path(__file__).parent
VECS = [[1, 0, 0, 0], [0, 3, 4, 0], [1, 1, 1, 1]]
TOKENS = [5, 30, 12]
TAGS = [0, 1, 0]


def write(path, tags):
    with open(path, "wb") as f:
        f.write(b"SEMC")
        f.write(struct.pack("<IQI", 1, len(VECS), len(VECS[0])))
        for v in VECS:
            f.write(struct.pack("<%df" % len(v), *v))
        f.write(struct.pack("<%dI" % len(TOKENS), *TOKENS))
        if tags:
            f.write(struct.pack("<%dI" % len(TAGS), *TAGS))


write(HERE / "tiny.semc", True)
write(HERE / "tiny_notags.semc", False)
with open(HERE / "tiny.csv", "w") as f:
    f.write("id,token_len,source,x0,x1,x2,x3\n")
    names = ["nq", "trivia", "nq"]
    for i, (v, t) in enumerate(zip(VECS, TOKENS)):
        f.write(",".join([str(i), str(t), names[i]] + [str(x) for x in v]) + "\n")
