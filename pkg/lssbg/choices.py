class Choice:
    """
    Base choice. Groups a raw value with a short name and a label.
    """
    def __init__(self, value, name, verbose_value):
        self.value = value
        self.name = name
        self.verbose_value = verbose_value

    def __eq__(self, other):
        if isinstance(other, Choice):
            return self.value == other.value
        return self.value == other or self.name == other

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return '<%s %s=%r>' % (self.__class__.__name__, self.name, self.value)

    def __str__(self):
        return self.name


class LabelChoice(Choice):
    """
    A ground-truth label. `scored` says how pixels carrying the label count
    during evaluation: True for positives, False for negatives, None when
    the pixel is skipped.
    """
    def __init__(self, value, name, verbose_value, scored):
        super().__init__(value, name, verbose_value)
        self.scored = scored


class ChoiceSet(type):
    """
    Metaclass for the choice set, used to make it easier to get all choices at
    once.
    """
    @property
    def values(cls):
        return tuple(choice.value for choice in cls.all)

    def __getattr__(cls, item):
        try:
            return next(filter(lambda choice: choice.name == item, cls.all))
        except StopIteration:
            raise AttributeError(item) from None


class GroundTruthLabels(metaclass=ChoiceSet):
    """
    Per-pixel labels of benchmark ground-truth images.
    """
    all = (
        LabelChoice(0, 'static', 'Static', False),
        LabelChoice(50, 'hard_shadow', 'Hard shadow', False),
        LabelChoice(85, 'outside_roi', 'Outside ROI', None),
        LabelChoice(170, 'unknown', 'Unknown motion', None),
        LabelChoice(255, 'motion', 'Motion', True),
    )
    positive = tuple(label for label in all if label.scored is True)
    negative = tuple(label for label in all if label.scored is False)


class StructuringShapes(metaclass=ChoiceSet):
    """
    Neighborhood shapes available for binary morphology.
    """
    all = (
        Choice('disk', 'disk', 'Disk'),
        Choice('square', 'square', 'Square'),
    )


class MetricOrder(metaclass=ChoiceSet):
    """
    The seven evaluation metrics, with the direction that counts as better.
    """
    all = (
        Choice('recall', 'recall', 'Recall'),
        Choice('specificity', 'specificity', 'Specificity'),
        Choice('fpr', 'fpr', 'False positive rate'),
        Choice('fnr', 'fnr', 'False negative rate'),
        Choice('pbc', 'pbc', 'Percentage of bad classification'),
        Choice('precision', 'precision', 'Precision'),
        Choice('fmeasure', 'fmeasure', 'F-measure'),
    )
    higher_is_better = (all[0], all[1], all[5], all[6])
