# -*- coding: utf-8 -*-
"""Base output handler"""
import sys
import logging
from terminaltables import AsciiTable, SingleTable


class BaseOutput(object):
    """Output handler for store artifacts rendered on the console"""

    def __init__(self, data):
        """

        Args:
            data (dict): The artifact to render, as read from the run store.
        """
        self.log = logging.getLogger('{}.{}'.format(self.__module__, type(self).__name__))
        self.data = data
        self.colored = True

        if sys.stdout.encoding == 'utf-8':
            self.safe = False
        else:
            self.safe = True

    @staticmethod
    def format_number(value, digits=4):
        """Formats an optional number.

        Args:
            value (float): The number, or None.
            digits (int, optional): Defaults to 4. Digits after the decimal point.

        Returns:
            str
        """
        if value is None:
            return '-'
        return '{0:.{1}f}'.format(value, digits)

    def _plot_value(self, value, max_value, max_bar_size=30):
        """Returns a bar proportional to `value / max_value`.

        Args:
            value (float): The value.
            max_value (float): The value that corresponds to a full bar.
            max_bar_size (int, optional): Defaults to 30. The bar size that corresponds to 100%.

        Returns:
            str: the bar
        """

        ticks = ('█', '|')
        the_tick = ticks[1] if self.safe else ticks[0]

        try:
            factor = max_bar_size * max(value, 0.0) / max_value
        except ZeroDivisionError:
            self.log.warning('Unable to plot against a zero maximum.')
            return ''
        return str(the_tick * int(min(factor, max_bar_size)))

    def _create_table(self, data, title=None):
        """Creates a console printable table based on the provided data.

        Args:
            data (list): List of data (As expected by terminaltables's table classes).
            title (str, optional): The table title.

        Returns:
            str: A console printable table.
        """

        if self.safe:
            table = AsciiTable(data)
        else:
            table = SingleTable(data)

        if title:
            table.title = ' {} '.format(title)

        table.inner_column_border = False
        table.inner_footing_row_border = True

        return table.table

    def set_color(self, color_method, items):
        """Sets a terminal color for all items in a list

        Args:
            color_method: A color method from the Color class to be used to format the list items.
            items: A list of items to be colored.
        Returns:
            list
        """
        if self.colored:
            return [color_method(str(item), auto=True) for item in items]
        return [str(item) for item in items]

    def tables(self):
        """Console printable tables"""
        raise NotImplementedError

    def __str__(self):
        ret = ''
        for table in self.tables():
            ret += table + '\n\n'
        return ret
