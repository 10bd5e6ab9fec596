"""
Banner for the pretty report format
"""
from pyfiglet import Figlet, FigletError


def create_banner(text: str, font_style: str = "small") -> str:
    """
    Render a title with pyfiglet

    Args:
        text: Title text
        font_style: Font style to use (small, doom, lean, ...)

    Returns:
        str: The rendered banner, or the plain title if the font is missing
    """
    try:
        return Figlet(font=font_style).renderText(text).rstrip("\n")
    except FigletError:
        return text
