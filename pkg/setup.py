from setuptools import setup, find_packages


setup(
    name="ql1pipe",
    version="0.1.0",
    description="Matrix-free solvers, problem generators and benchmark harness for quadratic l1-regularized problems",
    author="ql1pipe developers",
    license="GNU General Public License version 3",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    install_requires=[
        "joblib",
        "tqdm",
        "numpy",
        "pandas",
        "mpi4py",
        "colorama",
        "beautifulsoup4",
        "lxml"
    ],
    extras_require={
        "test": ["pytest"]
    },

    keywords=['optimization', 'l1-regularization', 'conjugate-gradient', 'benchmark', 'mpi'],
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Operating System :: POSIX :: Linux',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11'
    ],
)
