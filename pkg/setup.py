import setuptools
import feaslab

version = feaslab.version.rsplit(' ', maxsplit=1)[-1]

with open('requirements.txt', 'r') as f:
    requirements = f.read().splitlines()

setuptools.setup(
    name='feaslab',
    version=version,
    scripts=['feaslab_cli'],
    python_requires='>=3.8',
    install_requires=requirements,
    extras_require={
        'tests': ['pytest', 'pytest-asyncio'],
    },
    packages=setuptools.find_packages(include=('feaslab*',)),
    description='Portfolio feasibility laboratory',
    license='MIT Licence',
    long_description='Minimax and Expected Shortfall portfolio optimization '
    'on finite samples, sample dominance and Monte Carlo feasibility '
    'phase diagrams',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Framework :: AsyncIO',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        "Programming Language :: Python :: 3.8",
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Office/Business :: Financial :: Investment',
    ],
)
