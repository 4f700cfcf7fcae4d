"""Format all .py sources and the executable scripts using `black`.

This assumes `black` (https://github.com/python/black) is installed.

To run:
$ python format_sources.py
"""

import os
import subprocess


def format_py_code(path):
    path = os.path.abspath(path)
    print(
        'Formating .py files in directory "{}" and its subdirectories using '
        '"black"...'.format(path)
    )
    subprocess.call(['black', '--quiet', '--line-length', '90', path])
    scripts = os.path.join(path, 'bin')
    for f in os.listdir(scripts):
        subprocess.call(['black', '--quiet', '--line-length', '90', os.path.join(scripts, f)])
    print('Formatting .py files done.')


if __name__ == '__main__':
    format_py_code('../')
