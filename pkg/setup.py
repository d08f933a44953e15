"""A setuptools based setup module.
See:
https://packaging.python.org/en/latest/distributing.html
"""

from setuptools import setup, find_packages
from os import path

here = path.abspath(path.dirname(__file__))

with open(path.join(here, 'README.md')) as f:
    long_description = f.read()

setup(
    name='etikettr',
    version='0.1.0',
    description='Multi-label text classification by generating label sequences',
    long_description=long_description,
    long_description_content_type='text/markdown',
    author='Robert Rodger',
    author_email='woodenrabbit@gmail.com',

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Text Processing :: Linguistic',
        'License :: OSI Approved :: GNU Lesser General Public License v2 or later (LGPLv2+)',
        'Programming Language :: Python :: 3'
    ],
    keywords='multi-label classification sequence-to-sequence attention dilated convolution',

    packages=find_packages(exclude=['contrib', 'docs', 'tests']),
    package_data={
        'etikettr.test': ['test_data/*'],
    },

    install_requires=[
        'numpy >= 1.11.3',
        'scipy >= 0.18.1',
        'smart_open >= 1.8.1',
    ],

    extras_require={
        'test': ['pytest'],
    },

    entry_points={
        'console_scripts': [
            'etikettr=etikettr.cli:main',
        ],
    },
)
