from io import open
from os import path
from setuptools import setup, find_packages

THIS_FOLDER = path.abspath(path.dirname(__file__))

# Get package version from .version file
with open(path.join(THIS_FOLDER, '.version')) as f:
    VERSION = f.read()

# Get long description from README file
with open(path.join(THIS_FOLDER, 'README.md'), encoding='utf-8') as f:
    README = f.read()

setup(
    name='gradcascade',
    version=VERSION,
    description='Gradient cascade finite-size scaling laboratory for grokking MLPs',
    long_description=README,
    long_description_content_type="text/markdown",
    license='MIT',
    keywords='grokking self-organized-criticality finite-size-scaling avalanche',
    classifiers=[
        'Programming Language :: Python :: 3'
    ],
    python_requires='>=3.7',
    packages=find_packages(exclude=['docs', 'tests']),
    install_requires=[
        'numpy',
        'scipy',
        'networkx',
        'terminaltables',
        'colorclass',
        'colorama',
    ],
    entry_points={
        'console_scripts': [
            'gradcascade = gradcascade.cli:main',
        ],
    },
)
