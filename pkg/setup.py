import os

from setuptools import setup, find_packages


def get_version(root_dir):
    with open(os.path.join(root_dir, 'VERSION')) as version_file:
        version = version_file.read().strip()
    return version


install_requires = [
    'numpy>=1.17',
    'scipy>=1.3',
    'pandas>=1.0',
    'psutil',
]
test_requires = [
    'pytest',
    'pytest-cov',
    'coverage',
    'codecov',
    'flake8',
]
doc_requires = [
    'numpydoc',
    'sphinx',
    'sphinx-rtd-theme',
]

extras = {
    'test': test_requires,
    'doc': doc_requires
}

setup(
    name="rebh",
    version=get_version("rebh"),
    description="Randomized e-BH and related multiple testing procedures",
    python_requires='>=3.7',
    tests_require=test_requires,
    extras_require=extras,
    packages=find_packages(),
    install_requires=install_requires,
    package_data={'rebh': ['VERSION']},
    entry_points={
        'console_scripts': ['rebh=rebh.cli:main'],
    },
)
