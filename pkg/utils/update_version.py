"""Set the package version in every file that records it.

To run:
$ python update_version.py 0.1.1
"""

import os
import re
import sys

# file (relative to the repo root) -> name assigned the version string
VERSION_FILES = {
    os.path.join("fedalign", "__init__.py"): "__version__",
    os.path.join("docs", "source", "conf.py"): "release",
}


def set_version(path, name, version):
    with open(path, "r") as fin:
        text = fin.read()
    pattern = r"^({}\s*=\s*)['\"][^'\"]*['\"]".format(re.escape(name))
    text, n = re.subn(pattern, r'\g<1>"{}"'.format(version), text, flags=re.M)
    if n != 1:
        raise RuntimeError('Expect one "{}" in {}, found {}.'.format(name, path, n))
    with open(path, "w") as fout:
        fout.write(text)


if __name__ == "__main__":
    if len(sys.argv) != 2:
        print("usage: python update_version.py <version>")
        sys.exit(1)
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    for fname, name in VERSION_FILES.items():
        set_version(os.path.join(root, fname), name, sys.argv[1])
