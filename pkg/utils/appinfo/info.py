import os

GPL_NOTICE = ("This program is free software: you can redistribute it and/or modify\n"
              "it under the terms of the GNU General Public License as published by\n"
              "the Free Software Foundation, either version 3 of the License, or\n"
              "(at your option) any later version.\n\n"
              "This program is distributed in the hope that it will be useful,\n"
              "but WITHOUT ANY WARRANTY; without even the implied warranty of\n"
              "MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the\n"
              "GNU General Public License for more details.\n\n"
              "You should have received a copy of the GNU General Public License\n"
              "along with this program.  If not, see <https://www.gnu.org/licenses/>.\n")


def version_text(name: str, version: str, year: str, *authors, **kwargs) -> str:
    """
    Program version banner in GNU GPLv3 short-notice form.

    ### Parameters:
    :param name: Name of program.
    :param version: Version string.
    :param year: Year of copyright.
    - args
      - authors: Copyright holders.
    - kwargs
      - ascii_banner: System file path to an ASCII art banner printed above the notice.

    ### Returns:
    :return: Text to print for --version.
    """
    parts = list()
    banner_path = kwargs.get("ascii_banner")
    if banner_path is not None and os.path.isfile(banner_path):
        with open(banner_path, "rt") as fin:
            parts.append(fin.read())

    parts.append("{} v{}  Copyright (C) {}  {}".format(name, version, year, ", ".join(authors)))
    parts.append("This program comes with ABSOLUTELY NO WARRANTY. This is free software, and you are\n"
                 "welcome to redistribute it under the terms of the GNU GPLv3; run with --license for details.")
    return "\n\n".join(parts)


def license_text(desc: str, year: str, *authors) -> str:
    """Full GPLv3 license notice for --license."""
    return "{}\n\nCopyright (C) {}  {}\n\n{}".format(desc, year, ", ".join(authors), GPL_NOTICE)
