from setuptools import find_packages, setup


setup(
    name='lssbg',
    packages=find_packages(),
    install_requires=[
        'Django>=3.2,<5.0',
        'numpy>=1.20',
        'Pillow>=8.0',
        'scipy>=1.6',
    ],
)
