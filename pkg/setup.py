import os
from setuptools import setup, find_packages

here = os.path.abspath(os.path.dirname(__file__))

with open(os.path.join(here, 'README.rst')) as f:
    README = f.read()

with open(os.path.join(here, 'CHANGELOG.rst')) as f:
    CHANGELOG = f.read()


REQUIREMENTS = [
    'numpy>=1.20',
    'pandas>=1.5',
    'scipy>=1.7',
    'pymoo>=0.6',
    'colander>=1.8',
    'konfig>=1.1',
]

ENTRY_POINTS = {
    'console_scripts': [
        'moevcs = moevcs.cli:main',
    ]}

setup(name='moevcs',
      version='0.1.0.dev0',
      description='Multi-objective EV charging and discharging scheduling',
      long_description=README + "\n\n" + CHANGELOG,
      license='Apache License (2.0)',
      classifiers=[
          "Programming Language :: Python",
          "Programming Language :: Python :: 3",
          "Topic :: Scientific/Engineering",
          "License :: OSI Approved :: Apache Software License"
      ],
      keywords="ev charging scheduling nsga-ii multi-objective",
      author='Mozilla Services',
      author_email='services-dev@mozilla.com',
      url='',
      packages=find_packages(),
      include_package_data=True,
      zip_safe=False,
      python_requires='>=3.8',
      install_requires=REQUIREMENTS,
      entry_points=ENTRY_POINTS)
