import os

from ...synthetic import MovingSquareScene, write_dataset
from ..base import PipelineCommand


class Command(PipelineCommand):
    help = (
        'Write a synthetic benchmark category: a textured square moving '
        'across a static checker background, with ground truth.'
    )

    def add_arguments(self, parser):
        parser.add_argument('root', help='Category directory to write videos into.')
        parser.add_argument('--videos', type=int, default=1, help='Number of videos (one seed each).')
        parser.add_argument('--size', type=int, default=64, help='Frame width and height in pixels.')
        parser.add_argument('--square', type=int, default=16, help='Side of the moving square.')
        parser.add_argument('--train-frames', type=int, default=20)
        parser.add_argument('--eval-frames', type=int, default=10)
        parser.add_argument('--step', type=int, default=2, help='Square movement per frame in pixels.')
        parser.add_argument('--noise', type=int, default=2, help='Amplitude of the uniform pixel noise.')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--shadow', action='store_true', help='Cast a shadow under the square.')
        parser.add_argument('--format', choices=('jpg', 'png'), default='jpg', dest='image_format')

    def run(self, options):
        for index in range(options['videos']):
            scene = MovingSquareScene(
                width=options['size'],
                height=options['size'],
                square=options['square'],
                train_frames=options['train_frames'],
                eval_frames=options['eval_frames'],
                step=options['step'],
                noise=options['noise'],
                seed=options['seed'] + index,
                shadow=options['shadow'],
            )
            video_dir = os.path.join(options['root'], 'video%d' % (index + 1))
            first, last = write_dataset(video_dir, scene, options['image_format'])
            self.stdout.write('Wrote %s (evaluated frames %d-%d).' % (video_dir, first, last))
