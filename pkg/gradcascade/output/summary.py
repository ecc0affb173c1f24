#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Analysis summary output"""

import sys
import colorama
from colorclass import Color, Windows

from gradcascade.output.base import BaseOutput

colorama.init()

try:
    if sys.stdout.encoding == 'utf-8':
        Windows.enable(auto_colors=True, reset_atexit=True)
except AttributeError:
    pass


class SummaryOutput(BaseOutput):
    """Output handler for `summary.json`

    Args:
        summary (dict): The analysis summary.
        d_of_t (list, optional): Rows of `analysis/d_of_t.csv` as dictionaries.
    """

    def __init__(self, summary, d_of_t=None):
        super(SummaryOutput, self).__init__(summary)
        self.d_of_t = list(d_of_t or [])

    def exponent_table(self):
        """Headline exponents with their fit quality or bootstrap band.

        Returns:
            str
        """
        data = self.data
        fmt = self.format_number
        table_data = [['Quantity', 'Value', 'R2 / 95% band']]

        for label, key in (('D (aggregate)', 'D_aggregate'), ('gamma', 'gamma')):
            fit = data.get(key)
            if fit:
                table_data.append([label, fmt(fit['exponent']), fmt(fit.get('r_squared'))])
            else:
                table_data.append(self.set_color(Color.yellow, [label, '-', 'not fitted']))

        for label, key in (('D_pre', 'D_pre'), ('D_post', 'D_post'), ('D_synth (bootstrap)', 'D_synth_bootstrap')):
            band = data.get(key)
            if band:
                interval = '[{}, {}]'.format(fmt(band.get('low')), fmt(band.get('high')))
                table_data.append([label, fmt(band['mean']), interval])
            else:
                table_data.append(self.set_color(Color.yellow, [label, '-', 'no data']))

        table_data.append(['D_synth', fmt(data.get('D_synth')), ''])
        table_data.append(['CV across topologies', fmt(data.get('cv_topology')), ''])
        table_data.append(['D (full campaign)', fmt(data.get('D_full_campaign')), ''])
        table_data.append(['max |D_loo - D|', fmt(data.get('loo_max_delta')), ''])
        table_data.append(['collapse dispersion', fmt(data.get('collapse_dispersion_fitted')),
                           'raw {}'.format(fmt(data.get('collapse_dispersion_raw')))])
        table_data.append(['median cascade steps', fmt(data.get('median_cascade_steps'), 1), ''])

        coverage = data.get('coverage', {})
        table_data.append([
            'Runs: {} of {}, {} without grokking, fit subset `{}`'.format(
                coverage.get('present_runs'), coverage.get('expected_runs'), data.get('ungrokked_runs'),
                data.get('aggregate_subset'))
        ])
        return self._create_table(data=table_data, title='Finite-size scaling')

    def time_table(self, max_bar_size=30, target=1.0):
        """D(t) as a bar plot; rows at or above `target` are cyan.

        Args:
            max_bar_size (int, optional): Defaults to 30. Bar size of the largest exponent.
            target (float, optional): Defaults to 1.0. Reference exponent.

        Returns:
            str
        """
        if not self.d_of_t:
            self.log.debug('No D(t) rows, skipping table.')
            return None

        values = [float(row['D']) for row in self.d_of_t]
        top = max(max(values), target)
        table_data = [['Epoch', 'Plot', 'D', 'R2']]
        for row, value in zip(self.d_of_t, values):
            line = (row['epoch'], self._plot_value(value, top, max_bar_size), self.format_number(value, 3),
                    self.format_number(float(row['r_squared']), 3))
            color = Color.cyan if value >= target else Color.red
            table_data.append(self.set_color(color, line))
        return self._create_table(data=table_data, title='D(t)')

    def tables(self):
        return [table for table in (self.exponent_table(), self.time_table()) if table]
