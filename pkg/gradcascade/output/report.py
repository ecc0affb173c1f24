#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Acceptance report output"""

from colorclass import Color

from gradcascade.output.base import BaseOutput


class ReportOutput(BaseOutput):
    """Output handler for acceptance results

    Args:
        criteria (list): CriterionResult objects or their dictionaries (as stored in `report.json`).
    """

    COLORS = {
        'pass': Color.cyan,
        'fail': Color.red,
        'unevaluable': Color.yellow,
    }

    def __init__(self, criteria):
        super(ReportOutput, self).__init__([
            criterion if isinstance(criterion, dict) else criterion.as_dict() for criterion in criteria
        ])

    @property
    def passed(self):
        """Whether every criterion passed"""
        return all(criterion['status'] == 'pass' for criterion in self.data)

    @property
    def failed_criteria(self):
        """Numbers of the criteria that did not pass"""
        return [criterion['number'] for criterion in self.data if criterion['status'] != 'pass']

    def tables(self, failed_only=False):
        """
        Args:
            failed_only (bool): Whether the table should only contain criteria that did not pass.

        Returns:
            list
        """
        table_data = [['#', 'Criterion', 'Measured', 'Expected', 'Result']]
        for criterion in self.data:
            if failed_only and criterion['status'] == 'pass':
                continue
            line = (criterion['number'], criterion['name'], criterion['measured'], criterion['expected'],
                    criterion['status'].upper())
            table_data.append(self.set_color(self.COLORS[criterion['status']], line))

        table_data.append(['Overall: {}'.format('PASS' if self.passed else 'FAIL')])
        return [self._create_table(data=table_data, title='Acceptance')]
